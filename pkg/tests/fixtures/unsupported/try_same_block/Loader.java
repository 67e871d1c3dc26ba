package com.acme.fx;

import android.app.Activity;
import android.content.Context;
import android.content.res.Resources;

public class Loader extends Activity {
    int load(Context context) {
        Resources res = getResources();
        int c = res.getColor(R.color.loader);
        return c;
    }
}
