package net.probe;

import android.content.Context;
import android.content.res.Resources;
import android.graphics.drawable.Drawable;
import android.net.*;
import androidx.core.content.ContextCompat;

public class LinkProbe {
    private ConnectivityManager manager;

    int links() {
        Network[] found = manager.getAllNetworks();
        return found.length;
    }

    Drawable statusIcon(Context context, Resources res) {
        Drawable icon = ContextCompat.getDrawable(context, R.drawable.link_up);
        return icon;
    }
}
