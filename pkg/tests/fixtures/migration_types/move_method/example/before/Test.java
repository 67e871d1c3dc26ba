package demo;

import android.webkit.*;

public class Test {
    void bar() {
        CookieSyncManager.getInstance().sync();
    }
}
