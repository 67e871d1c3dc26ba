package com.acme.avatars;

import android.content.Context;
import android.content.res.Resources;
import android.graphics.drawable.Drawable;
import androidx.core.content.ContextCompat;

public class AvatarLoader {
    private final Context ctx;
    private final Resources resources;

    AvatarLoader(Context ctx) {
        this.ctx = ctx;
        this.resources = ctx.getResources();
    }

    Drawable placeholder() {
        Drawable fallback = ContextCompat.getDrawable(ctx, R.drawable.avatar_placeholder);
        return fallback;
    }
}
