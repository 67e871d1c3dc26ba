package demo;

import android.app.Activity;
import android.content.Context;
import android.content.res.Resources;

public class Test extends Activity {
    int bar(Context context) {
        Resources res = getResources();
        int c = res.getColor(R.color.primary);
        return c;
    }
}
