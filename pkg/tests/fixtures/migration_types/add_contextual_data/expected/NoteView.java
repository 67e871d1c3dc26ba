package com.acme.notes;

import android.text.Html;
import android.widget.TextView;

public class NoteView {
    private TextView summary;

    void show(Note note) {
        String body = note.getBody();
        summary.setText(Html.fromHtml(body, Html.FROM_HTML_MODE_LEGACY));
    }
}
