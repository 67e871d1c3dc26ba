package com.acme.fx;

import android.app.Activity;
import android.content.Context;
import android.content.res.Resources;

public class Loader extends Activity {
    int load(Context context) {
        Resources res = context.getResources();
        int c = res.getColor(R.color.loader, null);
        return c;
    }
}
