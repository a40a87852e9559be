use num_complex::Complex64;

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let out = rounded.to_string();
    if out == "-0" {
        "0".into()
    } else {
        out
    }
}

/// `a+bi` with both parts at 12 significant digits.
pub fn complex12(z: Complex64) -> String {
    let im = sig12(z.im);
    if im.starts_with('-') {
        format!("{}{}i", sig12(z.re), im)
    } else {
        format!("{}+{}i", sig12(z.re), im)
    }
}

/// Left-aligned columns separated by two spaces, no trailing whitespace.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            s.push_str(cell);
            s.extend(std::iter::repeat_n(' ', w - cell.chars().count()));
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(headers.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}
