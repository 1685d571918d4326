use quartic_sos::{Complex64, QuadraticForm};

const DIGITS: usize = 12;

/// `v` rounded to twelve significant digits, shortest form.
pub fn real(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{}", if v == 0.0 { 0.0 } else { v });
    }
    let rounded: f64 = format!("{:.*e}", DIGITS - 1, v).parse().unwrap_or(v);
    if rounded == 0.0 {
        "0".into()
    } else if rounded.abs() < 1e-4 || rounded.abs() >= 1e12 {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// `a+bi`, or `a` when the imaginary part is zero.
pub fn complex(z: Complex64) -> String {
    let im = real(z.im);
    if im == "0" {
        return real(z.re);
    }
    let sign = if z.im < 0.0 { "-" } else { "+" };
    format!("{}{sign}{}i", real(z.re), real(z.im.abs()))
}

/// Components below `1e-12` of the largest print as zero.
pub fn vector(values: &[Complex64]) -> String {
    let scale = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let keep = |v: f64| if v.abs() <= 1e-12 * scale { 0.0 } else { v };
    let parts: Vec<String> = values.iter().map(|z| complex(Complex64::new(keep(z.re), keep(z.im)))).collect();
    format!("({})", parts.join(", "))
}

/// A quadratic form, dropping coefficients below `1e-12` of the largest.
pub fn quadratic(q: &QuadraticForm<Complex64>) -> String {
    let scale = q.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let cleaned = q.map(|c| {
        let keep = |v: f64| if v.abs() <= 1e-12 * scale { 0.0 } else { v };
        Complex64::new(keep(c.re), keep(c.im))
    });
    cleaned.to_form().render(|c| {
        if c.im == 0.0 {
            (c.re < 0.0, real(c.re.abs()))
        } else if c.re == 0.0 {
            (c.im < 0.0, format!("{}i", real(c.im.abs())))
        } else {
            (false, format!("({})", complex(*c)))
        }
    })
}

pub fn signs(s: &[i8; 3]) -> String {
    let parts: Vec<&str> = s.iter().map(|v| if *v > 0 { "+" } else { "-" }).collect();
    format!("({})", parts.join(","))
}

pub fn yes_no(v: bool) -> &'static str {
    if v {
        "yes"
    } else {
        "no"
    }
}
