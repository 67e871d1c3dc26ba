package com.acme.draw;

import android.graphics.Canvas;
import android.graphics.Paint;
import android.graphics.RectF;

public class FadeDrawer {
    private final Paint layerPaint = new Paint();

    void draw(Canvas c, RectF rect) {
        int count = c.saveLayer(rect, layerPaint);
        c.drawColor(0);
        c.restoreToCount(count);
    }
}
