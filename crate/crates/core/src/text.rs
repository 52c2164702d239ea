//! The labelled cycle text grammar.
//!
//! Cycles are written `(+a b)^L`, `(-a b)^L`, `(-a)^L`, `(+a)^0`, separated by
//! whitespace, e.g. `(+1 2)^1 (-3 4)^3 (-5)^2 (-6)^4 (+7)^0`. The printer
//! emits cycles sorted by smallest point with `a < b` inside transpositions;
//! the parser additionally accepts transpositions in reversed point order,
//! reading the label at the first written point. Points absent from the input
//! are fixed points with label 0.

use crate::element::{AffineElement, Sign, SignedPermutation};
use crate::error::{Error, Result};

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Self {
        Parser { bytes: s.as_bytes(), pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {:?}", c as char)))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            false
        };
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start {
            self.pos = start;
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.bytes[digits_start..self.pos]).unwrap();
        let value: i64 = text.parse().map_err(|_| self.error("integer out of range"))?;
        Ok(if negative { -value } else { value })
    }

    fn point(&mut self, n: usize) -> Result<usize> {
        let value = self.integer()?;
        if value < 1 || value > n as i64 {
            return Err(self.error(format!("point {value} out of range 1..={n}")));
        }
        Ok(value as usize)
    }
}

/// Parse an element in labelled cycle text at rank `n`.
pub fn parse_element(input: &str, n: usize) -> Result<AffineElement> {
    let mut p = Parser::new(input);
    let mut images: Vec<Option<(usize, Sign)>> = vec![None; n];
    let mut v = vec![0i64; n];
    loop {
        p.skip_ws();
        if p.peek().is_none() {
            break;
        }
        p.expect(b'(')?;
        let sign = match p.peek() {
            Some(b'+') => Sign::Plus,
            Some(b'-') => Sign::Minus,
            _ => return Err(p.error("expected '+' or '-'")),
        };
        p.pos += 1;
        let a = p.point(n)?;
        p.skip_ws();
        let b = if p.peek() != Some(b')') { Some(p.point(n)?) } else { None };
        p.skip_ws();
        p.expect(b')')?;
        p.expect(b'^')?;
        let label = p.integer()?;
        match b {
            None => {
                if images[a - 1].is_some() {
                    return Err(p.error(format!("point {a} appears twice")));
                }
                images[a - 1] = Some((a, sign));
                v[a - 1] = label;
            }
            Some(b) => {
                if a == b {
                    return Err(p.error(format!("transposition ({a} {b}) repeats a point")));
                }
                if images[a - 1].is_some() {
                    return Err(p.error(format!("point {a} appears twice")));
                }
                if images[b - 1].is_some() {
                    return Err(p.error(format!("point {b} appears twice")));
                }
                images[a - 1] = Some((b, sign));
                images[b - 1] = Some((a, sign));
                v[a - 1] = label;
                v[b - 1] = match sign {
                    Sign::Plus => -label,
                    Sign::Minus => label,
                };
            }
        }
    }
    let images: Vec<(usize, Sign)> = images
        .into_iter()
        .enumerate()
        .map(|(i, entry)| entry.unwrap_or((i + 1, Sign::Plus)))
        .collect();
    let sigma = SignedPermutation::from_images(&images)?;
    AffineElement::new(sigma, v)
}

/// Print an element in canonical labelled cycle text.
///
/// Requires `sigma` to decompose into 1- and 2-cycles whose translation
/// coordinates fit the grammar (`v_b = -v_a` across a positive pair, `v_b =
/// v_a` across a negative pair). With `omit_trivial_fixed`, fixed points with
/// label 0 are left out, matching the shorthand convention.
pub fn print_element(x: &AffineElement, omit_trivial_fixed: bool) -> Result<String> {
    let n = x.n();
    let mut parts = Vec::new();
    for i in 0..n {
        let t = x.sigma.target(i);
        if t < i {
            continue;
        }
        let sign = x.sigma.sign(i);
        let sign_char = if sign == Sign::Minus { '-' } else { '+' };
        if t == i {
            if sign == Sign::Plus && x.v[i] == 0 && omit_trivial_fixed {
                continue;
            }
            parts.push(format!("({sign_char}{})^{}", i + 1, x.v[i]));
        } else {
            if x.sigma.target(t) != i || x.sigma.sign(t) != sign {
                return Err(Error::NotCycleText);
            }
            let consistent = match sign {
                Sign::Plus => x.v[t] == -x.v[i],
                Sign::Minus => x.v[t] == x.v[i],
            };
            if !consistent {
                return Err(Error::NotCycleText);
            }
            parts.push(format!("({sign_char}{} {})^{}", i + 1, t + 1, x.v[i]));
        }
    }
    if parts.is_empty() {
        // Identity printed via its first fixed point to keep the text non-empty.
        parts.push("(+1)^0".to_string());
    }
    Ok(parts.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_canonical() {
        let s = "(+1 2)^1 (-3 4)^3 (-5)^2 (-6)^4 (+7)^0";
        let x = parse_element(s, 7).unwrap();
        assert_eq!(print_element(&x, false).unwrap(), s);
    }

    #[test]
    fn reversed_transposition_reads_label_at_first_point() {
        // (+7 6)^-1 denotes v_7 = -1, v_6 = 1, i.e. (+6 7)^1 canonically.
        let x = parse_element("(+7 6)^-1", 7).unwrap();
        let y = parse_element("(+6 7)^1", 7).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn omitted_points_are_fixed() {
        let x = parse_element("(-3)^2", 4).unwrap();
        assert_eq!(x.v, vec![0, 0, 2, 0]);
        assert_eq!(print_element(&x, true).unwrap(), "(-3)^2");
        assert_eq!(print_element(&x, false).unwrap(), "(+1)^0 (+2)^0 (-3)^2 (+4)^0");
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = parse_element("(+1 2)^", 4).unwrap_err();
        match err {
            Error::Parse { position, .. } => assert_eq!(position, 7),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(parse_element("(+1 1)^0", 4).is_err());
        assert!(parse_element("(+1 2)^0 (-2)^1", 4).is_err());
        assert!(parse_element("(+9)^0", 4).is_err());
    }

    #[test]
    fn identity_prints_nonempty() {
        let id = AffineElement::identity(3);
        assert_eq!(print_element(&id, true).unwrap(), "(+1)^0");
        assert_eq!(parse_element("(+1)^0", 3).unwrap(), id);
    }

    #[test]
    fn unprintable_elements_are_rejected() {
        // sigma = (+1 2) with v = (1, 1) does not fit the grammar.
        let mut x = AffineElement::transposition(2, 1, 2, Sign::Plus, 1);
        x.v[1] = 1;
        assert!(matches!(print_element(&x, false), Err(Error::NotCycleText)));
    }
}
