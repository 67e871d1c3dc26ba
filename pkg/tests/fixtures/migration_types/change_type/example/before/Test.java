package demo;

import android.net.*;

public class Test {
    void bar(ConnectivityManager cm) {
        NetworkInfo[] all = cm.getAllNetworkInfo();
        System.out.println(all.length);
    }
}
