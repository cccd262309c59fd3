/// Formats a double with 17 significant digits, like C's `%.17g`.
pub fn format_sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp).max(0) as usize;
        strip_zeros(format!("{:.*}", decimals, x))
    } else {
        let m = strip_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g17() {
        assert_eq!(format_sig17(1.0), "1");
        assert_eq!(format_sig17(0.5), "0.5");
        assert_eq!(format_sig17(0.1), "0.10000000000000001");
        assert_eq!(format_sig17(-2.25), "-2.25");
        assert_eq!(format_sig17(1e-7), "9.9999999999999995e-08");
        assert_eq!(format_sig17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(format_sig17(std::f64::consts::FRAC_1_SQRT_2), "0.70710678118654757");
        assert_eq!(format_sig17(0.0), "0");
    }

    #[test]
    fn round_trips() {
        for &x in &[0.1, 1.0 / 7.0, 123456.789, -1e-300, 6.02e23] {
            assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
        }
    }
}
