//! Textual syntax for arithmetic-function expressions.
//!
//! Grammar (whitespace insensitive):
//!   expr      := scale
//!   scale     := rational ':' scale | dirichlet
//!   dirichlet := pointwise ('*' pointwise)*          (Dirichlet convolution)
//!   pointwise := atom ('.' atom)*                    (pointwise product)
//!   atom      := '(' expr ')' | one | id | id^r | pow^s | mu | phi
//!              | jordan[m] | log | bigomega
//!   rational  := ['+'|'-'] digits ['/' digits]
//!
//! `.` binds tighter than `*`; the `c:` scale prefix binds loosest and nests
//! to the right. Errors carry the byte offset of the offending token.

use crate::error::{Error, Result};
use crate::exact::Rat;
use num_bigint::BigInt;

use super::ArithFn;

pub fn parse_expr(input: &str) -> Result<ArithFn> {
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
    };
    let e = p.scale()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn scale(&mut self) -> Result<ArithFn> {
        if matches!(self.peek(), Some(b) if b.is_ascii_digit() || b == b'-' || b == b'+') {
            let c = self.rational()?;
            if !self.eat(b':') {
                return Err(self.err("expected `:` after scale factor"));
            }
            let inner = self.scale()?;
            return Ok(ArithFn::scale(c, &inner));
        }
        self.dirichlet()
    }

    fn dirichlet(&mut self) -> Result<ArithFn> {
        let mut lhs = self.pointwise()?;
        while self.eat(b'*') {
            let rhs = self.pointwise()?;
            lhs = ArithFn::dirichlet(&lhs, &rhs);
        }
        Ok(lhs)
    }

    fn pointwise(&mut self) -> Result<ArithFn> {
        let mut lhs = self.atom()?;
        while self.eat(b'.') {
            let rhs = self.atom()?;
            lhs = ArithFn::pointwise(&lhs, &rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<ArithFn> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.scale()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
                Ok(e)
            }
            Some(b) if b.is_ascii_lowercase() => self.ident(),
            _ => Err(self.err("expected a function expression")),
        }
    }

    fn ident(&mut self) -> Result<ArithFn> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_lowercase()) {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        match name {
            "one" => Ok(ArithFn::one()),
            "id" => {
                if self.bytes.get(self.pos) == Some(&b'^') {
                    self.pos += 1;
                    let r = self.integer()?;
                    let r = u32::try_from(r).map_err(|_| Error::Parse {
                        pos: self.pos,
                        msg: "id exponent must be an integer in 0..=2^32".into(),
                    })?;
                    Ok(ArithFn::id_power(r))
                } else {
                    Ok(ArithFn::id())
                }
            }
            "pow" => {
                if self.bytes.get(self.pos) != Some(&b'^') {
                    return Err(self.err("expected `^` after `pow`"));
                }
                self.pos += 1;
                Ok(ArithFn::power(self.integer()?))
            }
            "mu" => Ok(ArithFn::mobius()),
            "phi" => Ok(ArithFn::euler_phi()),
            "jordan" => {
                if self.bytes.get(self.pos) != Some(&b'[') {
                    return Err(self.err("expected `[order]` after `jordan`"));
                }
                self.pos += 1;
                let m = self.integer()?;
                if self.bytes.get(self.pos) != Some(&b']') {
                    return Err(self.err("expected `]`"));
                }
                self.pos += 1;
                Ok(ArithFn::jordan(m))
            }
            "log" => Ok(ArithFn::log()),
            "bigomega" => Ok(ArithFn::big_omega()),
            _ => Err(Error::Parse {
                pos: start,
                msg: format!("unknown function name `{name}`"),
            }),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if matches!(self.bytes.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start || self.bytes[self.pos - 1] == b'-' || self.bytes[self.pos - 1] == b'+'
        {
            return Err(Error::Parse {
                pos: start,
                msg: "expected an integer".into(),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse {
                pos: start,
                msg: "integer out of range".into(),
            })
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected digits"));
        }
        Ok(std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    fn rational(&mut self) -> Result<Rat> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let num = self.digits()?;
        let den = if self.bytes.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            let dpos = self.pos;
            let d = self.digits()?;
            if d == BigInt::from(0) {
                return Err(Error::Parse {
                    pos: dpos,
                    msg: "zero denominator".into(),
                });
            }
            d
        } else {
            BigInt::from(1)
        };
        let r = Rat::new(num, den);
        Ok(if neg { -r } else { r })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Domain, FnClass};

    fn pos_of(e: Error) -> usize {
        match e {
            Error::Parse { pos, .. } => pos,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn parses_builtins() {
        for s in ["one", "id", "id^3", "pow^-2", "mu", "phi", "jordan[2]", "jordan[-1]", "log", "bigomega"] {
            let f = parse_expr(s).unwrap();
            assert_eq!(f.to_string(), s, "{s}");
        }
        assert_eq!(parse_expr("id").unwrap(), ArithFn::id());
        assert_eq!(parse_expr("log").unwrap().domain(), Domain::Real);
    }

    #[test]
    fn precedence_and_grouping() {
        // `.` binds tighter than `*`
        let f = parse_expr("mu*phi.id").unwrap();
        assert_eq!(
            f,
            ArithFn::dirichlet(
                &ArithFn::mobius(),
                &ArithFn::pointwise(&ArithFn::euler_phi(), &ArithFn::id())
            )
        );
        // scale binds loosest and nests right
        let g = parse_expr("1/2:2:mu*id").unwrap();
        assert_eq!(
            g,
            ArithFn::scale(
                Rat::new(BigInt::from(1), BigInt::from(2)),
                &ArithFn::scale(
                    Rat::new(BigInt::from(2), BigInt::from(1)),
                    &ArithFn::dirichlet(&ArithFn::mobius(), &ArithFn::id())
                )
            )
        );
        let h = parse_expr("(mu*id).one").unwrap();
        assert_eq!(
            h,
            ArithFn::pointwise(
                &ArithFn::dirichlet(&ArithFn::mobius(), &ArithFn::id()),
                &ArithFn::one()
            )
        );
        assert_eq!(parse_expr(" mu * id ").unwrap().to_string(), "mu*id");
    }

    #[test]
    fn parsed_classes_are_inferred() {
        assert_eq!(
            parse_expr("id^2").unwrap().class(),
            FnClass::CompletelyMultiplicative
        );
        assert_eq!(parse_expr("mu*id").unwrap().class(), FnClass::Multiplicative);
        assert_eq!(
            parse_expr("bigomega").unwrap().class(),
            FnClass::CompletelyAdditive
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(pos_of(parse_expr("nosuch").unwrap_err()), 0);
        assert_eq!(pos_of(parse_expr("mu*nosuch").unwrap_err()), 3);
        assert_eq!(pos_of(parse_expr("mu*").unwrap_err()), 3);
        assert_eq!(pos_of(parse_expr("(mu*id").unwrap_err()), 6);
        assert_eq!(pos_of(parse_expr("mu)id").unwrap_err()), 2);
        assert_eq!(pos_of(parse_expr("1/0:id").unwrap_err()), 2);
        assert_eq!(pos_of(parse_expr("jordan2").unwrap_err()), 6);
        assert!(parse_expr("id^-1").is_err());
        assert!(parse_expr("").is_err());
        assert!(parse_expr("3/2 id").is_err());
    }
}
