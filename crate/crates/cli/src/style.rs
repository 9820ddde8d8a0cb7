//! ANSI styling for text reports, controlled by `TEMPOEVAL_COLOR`.

pub fn color_enabled() -> bool {
    std::env::var("TEMPOEVAL_COLOR").is_ok_and(|v| v == "1")
}

fn paint(on: bool, code: &str, text: &str) -> String {
    if on {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn bold(on: bool, text: &str) -> String {
    paint(on, "1", text)
}

pub fn red(on: bool, text: &str) -> String {
    paint(on, "31", text)
}

pub fn yellow(on: bool, text: &str) -> String {
    paint(on, "33", text)
}

pub fn green(on: bool, text: &str) -> String {
    paint(on, "32", text)
}

/// Left-aligns the first column and right-aligns the rest.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> Vec<String> {
    let cols = header.len();
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.into_iter().enumerate().take(cols) {
            if i == 0 {
                out.push_str(&format!("{cell:<w$}", w = width[0]));
            } else {
                out.push_str(&format!("  {cell:>w$}", w = width[i]));
            }
        }
        out.trim_end().to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.extend(rows.iter().map(|r| line(r.iter().map(String::as_str).collect())));
    out
}
