package demo;

import android.content.Context;
import android.content.res.Resources;

public class Test {
    int bar(Context context, Resources res) {
        Resources.Theme theme = context.getTheme();
        int c = res.getColor(R.color.primary, theme);
        return c;
    }
}
