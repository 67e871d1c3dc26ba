package fm.player;

import android.content.Context;
import android.content.res.Resources;
import android.graphics.Canvas;
import android.graphics.Paint;
import android.graphics.RectF;
import android.os.VibrationEffect;
import android.os.Vibrator;

public class PlayerControls {
    private final Vibrator vibrator;
    private final Paint glow = new Paint();

    PlayerControls(Vibrator vibrator) {
        this.vibrator = vibrator;
    }

    void onSkip(long pulse) {
        vibrator.vibrate(VibrationEffect.createOneShot(pulse, VibrationEffect.DEFAULT_AMPLITUDE));
    }

    void drawGlow(Canvas canvas, RectF area) {
        int saved = canvas.saveLayer(area, glow);
        canvas.drawOval(area, glow);
        canvas.restoreToCount(saved);
    }

    int accent(Context ctx) {
        Resources r = ctx.getResources();
        int accent = r.getColor(R.color.player_accent);
        return accent;
    }
}
