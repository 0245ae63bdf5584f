//! Minimal deterministic SVG writer. Coordinates are printed with a fixed
//! number of decimals so identical inputs give identical bytes.

use std::fmt::Write;

pub(crate) struct SvgDoc {
    body: String,
}

pub(crate) fn num(x: f64) -> String {
    let s = format!("{x:.5}");
    // avoid "-0.00000"
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0.00000".to_string()
    } else {
        s
    }
}

impl SvgDoc {
    pub(crate) fn new(min_x: f64, min_y: f64, width: f64, height: f64) -> Self {
        let mut body = String::new();
        writeln!(
            body,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
            num(min_x),
            num(min_y),
            num(width),
            num(height)
        )
        .unwrap();
        Self { body }
    }

    pub(crate) fn raw(&mut self, line: &str) {
        self.body.push_str(line);
        self.body.push('\n');
    }

    pub(crate) fn line(&mut self, a: [f64; 2], b: [f64; 2], attrs: &str) {
        writeln!(
            self.body,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" {attrs}/>"#,
            num(a[0]),
            num(a[1]),
            num(b[0]),
            num(b[1])
        )
        .unwrap();
    }

    pub(crate) fn circle(&mut self, c: [f64; 2], r: f64, attrs: &str) {
        writeln!(
            self.body,
            r#"  <circle cx="{}" cy="{}" r="{}" {attrs}/>"#,
            num(c[0]),
            num(c[1]),
            num(r)
        )
        .unwrap();
    }

    pub(crate) fn text(&mut self, at: [f64; 2], size: f64, label: &str) {
        writeln!(
            self.body,
            r#"  <text x="{}" y="{}" font-size="{}" text-anchor="middle" dominant-baseline="central">{label}</text>"#,
            num(at[0]),
            num(at[1]),
            num(size)
        )
        .unwrap();
    }

    pub(crate) fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}
