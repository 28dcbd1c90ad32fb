//! Angle expressions such as `pi/6`, `3pi/8`, `-pi/4`, `0.5` or `2*pi/3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Parses a product/quotient of numbers and `pi`, with an optional leading
/// sign. Implicit multiplication (`3pi`) is accepted.
pub fn parse_angle(text: &str) -> Result<f64> {
    let bad = || Error::Config(format!("cannot parse angle expression {text:?}"));
    let mut rest = text.trim();
    let mut sign = 1.0;
    if let Some(r) = rest.strip_prefix('-') {
        sign = -1.0;
        rest = r.trim_start();
    } else if let Some(r) = rest.strip_prefix('+') {
        rest = r.trim_start();
    }
    if rest.is_empty() {
        return Err(bad());
    }

    let mut value = 1.0;
    let mut divide = false;
    let mut expect_factor = true;
    let mut chars = rest.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let factor = if c.is_whitespace() {
            chars.next();
            continue;
        } else if c == '*' || c == '/' {
            if expect_factor {
                return Err(bad());
            }
            divide = c == '/';
            expect_factor = true;
            chars.next();
            continue;
        } else if rest[i..].starts_with("pi") {
            chars.next();
            chars.next();
            PI
        } else if c.is_ascii_digit() || c == '.' {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                let exp_sign = (d == '-' || d == '+') && matches!(rest[..j].chars().last(), Some('e' | 'E'));
                if d.is_ascii_digit() || d == '.' || d == 'e' || d == 'E' || exp_sign {
                    end = j + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            rest[i..end].parse::<f64>().map_err(|_| bad())?
        } else {
            return Err(bad());
        };
        if divide {
            if factor == 0.0 {
                return Err(bad());
            }
            value /= factor;
        } else {
            value *= factor;
        }
        divide = false;
        expect_factor = false;
    }
    if expect_factor {
        return Err(bad());
    }
    Ok(sign * value)
}

/// Comma-separated list of angle expressions.
pub fn parse_angle_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_angle).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_of_pi() {
        assert_eq!(parse_angle("pi/6").unwrap(), PI / 6.0);
        assert_eq!(parse_angle("3pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle("3*pi/8").unwrap(), 3.0 * PI / 8.0);
        assert_eq!(parse_angle(" -pi / 4 ").unwrap(), -PI / 4.0);
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("0.5").unwrap(), 0.5);
        assert_eq!(parse_angle("1e-3").unwrap(), 1e-3);
        assert_eq!(parse_angle("0").unwrap(), 0.0);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "pi//2", "tau", "pi/", "/2", "pi/0", "1..2"] {
            assert!(parse_angle(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        assert_eq!(parse_angle_list("0,pi/4").unwrap(), vec![0.0, PI / 4.0]);
    }
}
