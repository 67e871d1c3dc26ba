package org.weather.ui;

import android.content.Context;
import android.content.res.Resources;
import android.graphics.drawable.Drawable;
import android.view.View;

public class ForecastView extends View {
    private final Resources res;
    private int tempColor;

    public ForecastView(Context context) {
        super(context);
        res = context.getResources();
    }

    void bindTemperature(int celsius) {
        int key = celsius > 25 ? R.color.hot : R.color.mild;
        tempColor = res.getColor(key, null);
        invalidate();
    }

    void bindBackground(Drawable sky) {
        // sky gradient from the theme
        setBackground(sky);
    }
}
