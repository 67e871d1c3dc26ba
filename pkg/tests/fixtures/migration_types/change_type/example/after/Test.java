package demo;

import android.net.*;

public class Test {
    void bar(ConnectivityManager cm) {
        Network[] all = cm.getAllNetworks();
        System.out.println(all.length);
    }
}
