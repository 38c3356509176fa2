//! Curve input: `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`, or a plain
//! coefficient list as accepted by `CurveF3q::parse`.

use phigal_core::ec_char3::{BaseField, CurveF3q, EcError};
use phigal_core::gf9::F9;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Mono {
    X3,
    X2,
    X,
    One,
    Y2,
    Xy,
    Y,
}

fn mono(s: &str) -> Option<Mono> {
    Some(match s {
        "x^3" => Mono::X3,
        "x^2" => Mono::X2,
        "x" => Mono::X,
        "" => Mono::One,
        "y^2" => Mono::Y2,
        "xy" | "yx" | "x*y" | "y*x" => Mono::Xy,
        "y" => Mono::Y,
        _ => return None,
    })
}

/// Splits at top-level `+`/`-`, keeping the sign with the term.
fn terms(side: &str) -> Result<Vec<(bool, String)>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    let mut neg = false;
    for ch in side.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth < 0 {
            return Err(format!("unbalanced parentheses in {side:?}"));
        }
        if depth == 0 && (ch == '+' || ch == '-') {
            if !cur.is_empty() {
                out.push((neg, std::mem::take(&mut cur)));
            } else if ch == '-' && neg {
                return Err(format!("doubled sign in {side:?}"));
            }
            neg = ch == '-';
            continue;
        }
        cur.push(ch);
    }
    if depth != 0 || cur.is_empty() {
        return Err(format!("cannot read {side:?}"));
    }
    out.push((neg, cur));
    Ok(out)
}

/// `coef*mono`, `(a+b*t)mono`, `mono`, or a bare constant.
fn split_term(t: &str) -> Result<(F9, Mono), String> {
    let bad = || format!("cannot read term {t:?}");
    let (coef, rest) = if let Some(body) = t.strip_prefix('(') {
        let close = body.find(')').ok_or_else(bad)?;
        let c: F9 = body[..close].parse().map_err(|_| bad())?;
        (c, &body[close + 1..])
    } else {
        let cut = t.find(['x', 'y']).unwrap_or(t.len());
        let head = &t[..cut];
        if head.is_empty() {
            (F9::ONE, t)
        } else {
            let c: F9 = head.trim_end_matches('*').parse().map_err(|_| bad())?;
            (c, &t[cut..])
        }
    };
    let rest = rest.strip_prefix('*').unwrap_or(rest);
    Ok((coef, mono(rest).ok_or_else(bad)?))
}

pub fn parse_curve(field: BaseField, text: &str) -> Result<CurveF3q, EcError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let Some((lhs, rhs)) = compact.split_once('=') else {
        return CurveF3q::parse(field, &compact);
    };
    let err = |m: String| EcError::Parse(m);
    // Collect everything as rhs - lhs = 0.
    let mut acc = [F9::ZERO; 7];
    for (side, is_lhs) in [(lhs, true), (rhs, false)] {
        for (neg, t) in terms(side).map_err(err)? {
            let (c, m) = split_term(&t).map_err(err)?;
            let c = if neg != is_lhs { c.neg() } else { c };
            acc[m as usize] = acc[m as usize].add(c);
        }
    }
    let minus_one = F9::ONE.neg();
    if acc[Mono::X3 as usize] != F9::ONE || acc[Mono::Y2 as usize] != minus_one {
        return Err(err(format!("{text:?} is not in the form y^2 + ... = x^3 + ...")));
    }
    let a = [
        acc[Mono::Xy as usize].neg(),
        acc[Mono::X2 as usize],
        acc[Mono::Y as usize].neg(),
        acc[Mono::X as usize],
        acc[Mono::One as usize],
    ];
    CurveF3q::new(field, a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equations() {
        let e = parse_curve(BaseField::F3, "y^2=x^3-x").unwrap();
        assert_eq!(e, CurveF3q::short(BaseField::F3, 0, -1, 0).unwrap());
        let e = parse_curve(BaseField::F3, "y^2 = x^3 + x^2 + 1").unwrap();
        assert_eq!(e, CurveF3q::short(BaseField::F3, 1, 0, 1).unwrap());
        let e = parse_curve(BaseField::F9, "y^2 + xy = x^3 + (1+t)x + t").unwrap();
        assert_eq!(
            e.coefficients(),
            [F9::ONE, F9::ZERO, F9::ZERO, "1+t".parse().unwrap(), F9::T]
        );
        let e = parse_curve(BaseField::F3, "-1, 1").unwrap();
        assert_eq!(e.point_count(), 7);
    }

    #[test]
    fn rejects() {
        assert!(matches!(parse_curve(BaseField::F3, "y^2=x^3"), Err(EcError::Singular(_))));
        assert!(matches!(parse_curve(BaseField::F3, "y^2=x^3+t"), Err(EcError::NotInBaseField(..))));
        assert!(matches!(parse_curve(BaseField::F3, "y^2=2x^3+1"), Err(EcError::Parse(_))));
        assert!(matches!(parse_curve(BaseField::F3, "y^2=x^3+z"), Err(EcError::Parse(_))));
    }
}
