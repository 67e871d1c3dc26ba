package com.acme.style;

import android.content.Context;
import android.content.res.Resources;

public class Palette {
    private final Context appContext;

    Palette(Context appContext) {
        this.appContext = appContext;
    }

    int tint(Resources resources) {
        Resources.Theme theme = appContext.getTheme();
        int tint = resources.getColor(R.color.tint, theme);
        return tint;
    }
}
