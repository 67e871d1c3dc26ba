package demo;

import android.os.VibrationEffect;
import android.os.Vibrator;

public class Test {
    void bar(Vibrator vibrator, long duration) {
        vibrator.vibrate(duration);
    }
}
