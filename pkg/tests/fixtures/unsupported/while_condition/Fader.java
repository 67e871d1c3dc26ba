package com.acme.fx;

import android.content.res.Resources;

public class Fader {
    void fade(Resources res, int step) {
        while (res.getColor(R.color.fade) > step) {
            step++;
        }
    }
}
