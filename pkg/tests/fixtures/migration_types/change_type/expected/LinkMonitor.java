package com.acme.net;

import android.net.*;

public class LinkMonitor {
    private ConnectivityManager connectivity;

    int countLinks() {
        Network[] infos = connectivity.getAllNetworks();
        return infos.length;
    }
}
