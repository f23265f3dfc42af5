//! Printer emitting the fewest parentheses the parser needs.

use super::{Expr, Width};

/// Output options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrintStyle {
    /// Show residues above `2^(n-1)` as negative numbers.
    pub signed: bool,
    /// Parenthesize bitwise operands that are themselves binary operators,
    /// e.g. `(x&y)|z` instead of `x&y|z`.
    pub explicit_bitwise_parens: bool,
}

impl Default for PrintStyle {
    fn default() -> Self {
        PrintStyle { signed: true, explicit_bitwise_parens: false }
    }
}

const OR: u8 = 1;
const XOR: u8 = 2;
const AND: u8 = 3;
const SUM: u8 = 4;
const PRODUCT: u8 = 5;
const UNARY: u8 = 6;
const POWER: u8 = 7;
const ATOM: u8 = 8;

pub fn print(e: &Expr, w: Width) -> String {
    print_with(e, w, PrintStyle::default())
}

pub fn print_with(e: &Expr, w: Width, style: PrintStyle) -> String {
    let mut p = Printer { w, style, out: String::new() };
    p.expr(e);
    p.out
}

struct Printer {
    w: Width,
    style: PrintStyle,
    out: String,
}

impl Printer {
    fn negative(&self, c: u64) -> bool {
        self.style.signed && self.w.is_negative(c)
    }

    /// Leading negative coefficient of a product, if printed with a sign.
    fn negative_lead<'a>(&self, fs: &'a [Expr]) -> Option<(u64, &'a [Expr])> {
        match fs.first() {
            Some(Expr::Const(c)) if self.negative(*c) => Some((self.w.neg(*c), &fs[1..])),
            _ => None,
        }
    }

    fn level(&self, e: &Expr) -> u8 {
        match e {
            Expr::Const(c) if self.negative(*c) => UNARY,
            Expr::Const(_) | Expr::Var(_) => ATOM,
            Expr::Not(_) => UNARY,
            Expr::Power(..) => POWER,
            Expr::Sum(_) => SUM,
            Expr::Product(fs) => match self.negative_lead(fs) {
                Some((1, [f])) if self.level(f) >= UNARY => UNARY,
                _ => PRODUCT,
            },
            Expr::And(_) => AND,
            Expr::Xor(_) => XOR,
            Expr::Or(_) => OR,
        }
    }

    fn operand(&mut self, e: &Expr, min_level: u8) {
        if self.level(e) < min_level {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.expr(e);
        }
    }

    fn bitwise_operand(&mut self, e: &Expr, own: u8) {
        let explicit = self.style.explicit_bitwise_parens
            && matches!(e, Expr::And(_) | Expr::Or(_) | Expr::Xor(_));
        if explicit {
            self.out.push('(');
            self.expr(e);
            self.out.push(')');
        } else {
            self.operand(e, own + 1);
        }
    }

    /// Factors of a product without any sign; `coef` of 1 is omitted.
    fn unsigned_product(&mut self, coef: u64, rest: &[Expr]) {
        let mut first = true;
        if coef != 1 || rest.is_empty() {
            self.out.push_str(&coef.to_string());
            first = false;
        }
        for f in rest {
            if !first {
                self.out.push('*');
            }
            first = false;
            self.operand(f, UNARY);
        }
    }

    fn expr(&mut self, e: &Expr) {
        match e {
            Expr::Const(c) => {
                if self.negative(*c) {
                    self.out.push('-');
                    self.out.push_str(&self.w.neg(*c).to_string());
                } else {
                    self.out.push_str(&c.to_string());
                }
            }
            Expr::Var(n) => self.out.push_str(n),
            Expr::Not(c) => {
                self.out.push('~');
                self.operand(c, UNARY);
            }
            Expr::Power(b, x) => {
                self.operand(b, ATOM);
                self.out.push_str("**");
                self.operand(x, UNARY);
            }
            Expr::Product(fs) => match self.negative_lead(fs) {
                Some((1, [f])) => {
                    self.out.push('-');
                    self.operand(f, UNARY);
                }
                Some((abs, rest)) => {
                    self.out.push('-');
                    self.unsigned_product(abs, rest);
                }
                None => {
                    for (i, f) in fs.iter().enumerate() {
                        if i > 0 {
                            self.out.push('*');
                        }
                        self.operand(f, UNARY);
                    }
                }
            },
            Expr::Sum(ts) => {
                for (i, t) in ts.iter().enumerate() {
                    if i == 0 {
                        self.operand(t, SUM + 1);
                        continue;
                    }
                    match t {
                        Expr::Const(c) if self.negative(*c) => {
                            self.out.push('-');
                            self.out.push_str(&self.w.neg(*c).to_string());
                        }
                        Expr::Product(fs) if self.negative_lead(fs).is_some() => {
                            let (abs, rest) = self.negative_lead(fs).unwrap();
                            self.out.push('-');
                            if abs == 1 && rest.len() == 1 {
                                self.operand(&rest[0], PRODUCT);
                            } else {
                                self.unsigned_product(abs, rest);
                            }
                        }
                        _ => {
                            self.out.push('+');
                            self.operand(t, SUM + 1);
                        }
                    }
                }
            }
            Expr::And(os) => self.bitwise(os, '&', AND),
            Expr::Xor(os) => self.bitwise(os, '^', XOR),
            Expr::Or(os) => self.bitwise(os, '|', OR),
        }
    }

    fn bitwise(&mut self, os: &[Expr], sym: char, own: u8) {
        for (i, o) in os.iter().enumerate() {
            if i > 0 {
                self.out.push(sym);
            }
            self.bitwise_operand(o, own);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn rt(s: &str) -> String {
        let w = Width::W64;
        print(&parse(s, w).unwrap(), w)
    }

    #[test]
    fn signed_sums() {
        let w = Width::W64;
        let e = Expr::Sum(vec![
            Expr::var("x"),
            Expr::var("y"),
            Expr::Product(vec![Expr::Const(w.minus_one()), Expr::var("z")]),
        ]);
        assert_eq!(print(&e, w), "x+y-z");
        assert_eq!(print(&Expr::Const(0), w), "0");
        assert_eq!(rt("x+(x&y)-2*(x|y)+42"), "x+(x&y)-2*(x|y)+42");
        assert_eq!(rt("-x-y"), "-x-y");
        assert_eq!(rt("-x|-y"), "-x|-y");
        assert_eq!(rt("a - (x+y)"), "a-(x+y)");
        assert_eq!(rt("-(~x&y)-2*~(x&y)"), "-(~x&y)-2*~(x&y)");
    }

    #[test]
    fn minimal_parentheses() {
        assert_eq!(rt("(x&y)|z"), "x&y|z");
        assert_eq!(rt("x&(y|z)"), "x&(y|z)");
        assert_eq!(rt("~(x*y)"), "~(x*y)");
        assert_eq!(rt("(x**y)**z"), "(x**y)**z");
        assert_eq!(rt("x**(y**z)"), "x**y**z");
        assert_eq!(rt("(-2)**x"), "(-2)**x");
        assert_eq!(rt("~(-x)"), "~-x");
        assert_eq!(rt("~(2*x)"), "~(2*x)");
        assert_eq!(rt("-(x**2)"), "-x**2");
    }

    #[test]
    fn explicit_bitwise_style() {
        let w = Width::W64;
        let e = parse("(x&~y)|(~x&y)", w).unwrap();
        let style = PrintStyle { explicit_bitwise_parens: true, ..PrintStyle::default() };
        assert_eq!(print_with(&e, w, style), "(x&~y)|(~x&y)");
    }

    #[test]
    fn unsigned_style() {
        let w = Width::new(8).unwrap();
        let e = parse("x-1", w).unwrap();
        let style = PrintStyle { signed: false, ..PrintStyle::default() };
        assert_eq!(print_with(&e, w, style), "x+255");
    }

    #[test]
    fn polynomial_round_trip() {
        let w = Width::W64;
        let e = parse("y*(x^y) - (x&y)**2 - 1", w).unwrap();
        assert_eq!(parse(&print(&e, w), w).unwrap(), e);
    }
}
