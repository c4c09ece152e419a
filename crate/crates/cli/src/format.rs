//! Fixed, C-compatible number formatting (`%.17g`) and CSV writing, so that
//! identical runs produce byte-identical files.

use std::io::{self, Write};

use num_complex::Complex64;

/// Formats `x` exactly as C's `printf("%.17g", x)`.
pub fn g17(x: f64) -> String {
    const P: i32 = 17;
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    // The exponent after rounding to P significant digits decides the style.
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, x);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", strip_zeros(mantissa), sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a `x,re,im` CSV with a header row and `\n` line endings.
pub fn write_csv<W: Write>(mut out: W, rows: impl IntoIterator<Item = (f64, Complex64)>) -> io::Result<()> {
    out.write_all(b"x,re,im\n")?;
    for (x, v) in rows {
        writeln!(out, "{},{},{}", g17(x), g17(v.re), g17(v.im))?;
    }
    out.flush()
}
