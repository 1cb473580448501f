//! The polynomial literal grammar used by every I/O surface.
//!
//! Terms `c*T^k` joined by `+` (or `-` when p > 2), coefficients as integers
//! mod p when e = 1, or `z`-polynomials (parenthesized when they have more
//! than one term) when e > 1.  The same grammar with variable `z` is used
//! for F_q elements themselves.

use crate::error::{Error, Result};

use super::{Field, Fq, FqElem, Poly, RationalFunc};

/// Format an F_p coefficient vector (ascending) in the variable `var`.
pub fn fmt_fp_poly(coeffs: &[u32], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (k, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let part = match (k, c) {
            (0, c) => format!("{c}"),
            (1, 1) => var.to_string(),
            (1, c) => format!("{c}*{var}"),
            (k, 1) => format!("{var}^{k}"),
            (k, c) => format!("{c}*{var}^{k}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join("+")
    }
}

/// Split on top-level `+`/`-` (outside parentheses); returns signed chunks.
fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::parse("unbalanced parentheses"));
                }
                cur.push(ch);
            }
            '+' | '-' if depth == 0 && i > 0 && !cur.trim().is_empty() => {
                out.push((neg, cur.trim().to_string()));
                cur = String::new();
                neg = ch == '-';
            }
            '-' if depth == 0 && cur.trim().is_empty() => {
                neg = !neg;
            }
            _ => cur.push(ch),
        }
    }
    if depth != 0 {
        return Err(Error::parse("unbalanced parentheses"));
    }
    if !cur.trim().is_empty() {
        out.push((neg, cur.trim().to_string()));
    }
    if out.is_empty() {
        return Err(Error::parse("empty polynomial"));
    }
    Ok(out)
}

/// Parse an element of F_q: an integer, or a polynomial in `z` when e > 1.
pub fn parse_fq_elem(fq: &Fq, s: &str) -> Result<FqElem> {
    let s = s.trim();
    let s = if s.starts_with('(') && s.ends_with(')') {
        &s[1..s.len() - 1]
    } else {
        s
    };
    let mut acc = fq.zero();
    for (neg, term) in split_terms(s)? {
        let val = parse_fq_term(fq, &term)?;
        let val = if neg { fq.neg(&val) } else { val };
        acc = fq.add(&acc, &val);
    }
    Ok(acc)
}

fn parse_fq_term(fq: &Fq, term: &str) -> Result<FqElem> {
    // forms: int | z | z^k | int*z^k
    let mut coef: i64 = 1;
    let mut rest = term.trim();
    if let Some(star) = rest.find('*') {
        let (c, r) = rest.split_at(star);
        coef = c
            .trim()
            .parse::<i64>()
            .map_err(|_| Error::parse(format!("bad coefficient `{c}`")))?;
        rest = r[1..].trim();
    } else if rest.chars().all(|c| c.is_ascii_digit()) {
        let n = rest
            .parse::<i64>()
            .map_err(|_| Error::parse(format!("bad integer `{rest}`")))?;
        return Ok(fq.from_int(n));
    }
    if !rest.starts_with('z') {
        return Err(Error::parse(format!("expected `z` term, got `{rest}`")));
    }
    let k: u32 = if rest == "z" {
        1
    } else if let Some(e) = rest.strip_prefix("z^") {
        e.trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad exponent `{e}`")))?
    } else {
        return Err(Error::parse(format!("bad term `{rest}`")));
    };
    if k >= fq.e() {
        // Reduce z^k via field arithmetic.
        let zk = fq.pow(&fq.gen(), k as u128);
        return Ok(fq.mul(&fq.from_int(coef), &zk));
    }
    let mut coords = vec![0u32; fq.e() as usize];
    let p = fq.p() as i64;
    coords[k as usize] = (((coef % p) + p) % p) as u32;
    Ok(fq.elem_from_coords(&coords))
}

/// Parse a polynomial in `T` over F_q.
pub fn parse_poly(fq: &Fq, s: &str) -> Result<Poly<Fq>> {
    let mut acc = Poly::zero(fq.clone());
    for (neg, term) in split_terms(s.trim())? {
        let t = parse_poly_term(fq, &term)?;
        let t = if neg { t.neg() } else { t };
        acc = acc.add(&t);
    }
    Ok(acc)
}

fn parse_poly_term(fq: &Fq, term: &str) -> Result<Poly<Fq>> {
    let term = term.trim();
    // forms: coef | T | T^k | coef*T | coef*T^k ; coef = int | z-form | (z-poly)
    if let Some(tpos) = find_var(term, 'T') {
        let (chead, tail) = term.split_at(tpos);
        let chead = chead.trim().trim_end_matches('*').trim();
        let coef = if chead.is_empty() {
            fq.one()
        } else {
            parse_fq_elem(fq, chead)?
        };
        let tail = tail.trim();
        let k: usize = if tail == "T" {
            1
        } else if let Some(e) = tail.strip_prefix("T^") {
            e.trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad exponent `{e}`")))?
        } else {
            return Err(Error::parse(format!("bad term `{term}`")));
        };
        Ok(Poly::monomial(fq.clone(), coef, k))
    } else {
        Ok(Poly::constant(fq.clone(), parse_fq_elem(fq, term)?))
    }
}

/// Position of the variable occurrence outside parentheses, if any.
fn find_var(s: &str, var: char) -> Option<usize> {
    let mut depth = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == var && depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Parse a rational function `poly` or `poly/poly`.
pub fn parse_rational(fq: &Fq, s: &str) -> Result<RationalFunc> {
    let s = s.trim();
    let mut depth = 0;
    let mut slash = None;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '/' if depth == 0 => {
                slash = Some(i);
                break;
            }
            _ => {}
        }
    }
    match slash {
        None => {
            let num = parse_poly(fq, s)?;
            RationalFunc::from_poly(num)
        }
        Some(i) => {
            let num = parse_poly(fq, strip_outer_parens(&s[..i]))?;
            let den = parse_poly(fq, strip_outer_parens(&s[i + 1..]))?;
            RationalFunc::new(num, den)
        }
    }
}

fn strip_outer_parens(s: &str) -> &str {
    let s = s.trim();
    if s.starts_with('(') && s.ends_with(')') {
        let inner = &s[1..s.len() - 1];
        let mut depth = 0;
        for ch in inner.chars() {
            match ch {
                '(' => depth += 1,
                ')' => {
                    depth -= 1;
                    if depth < 0 {
                        return s;
                    }
                }
                _ => {}
            }
        }
        if depth == 0 {
            return inner;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        let f2 = Fq::prime(2).unwrap();
        for s in ["T^3+T+1", "T^2+T", "T", "1", "T^4+T^3+T^2+T+1"] {
            let p = parse_poly(&f2, s).unwrap();
            assert_eq!(p.to_string_with_var("T"), s);
        }
    }

    #[test]
    fn parse_with_coefficients() {
        let f3 = Fq::prime(3).unwrap();
        let p = parse_poly(&f3, "2*T^2+T+2").unwrap();
        assert_eq!(p.to_string_with_var("T"), "2*T^2+T+2");
        let m = parse_poly(&f3, "T^2 - T - 1").unwrap();
        assert_eq!(m.to_string_with_var("T"), "T^2+2*T+2");
    }

    #[test]
    fn parse_extension_coefficients() {
        let f4 = Fq::new(2, 2).unwrap();
        let p = parse_poly(&f4, "(z+1)*T^2+z*T+1").unwrap();
        assert_eq!(p.to_string_with_var("T"), "(z+1)*T^2+z*T+1");
    }
}
