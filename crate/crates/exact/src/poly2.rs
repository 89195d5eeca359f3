//! Bivariate polynomials over the rationals.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::{parse_rational, rat_str, ExactError, Rational};

/// Sparse polynomial `sum c_{ij} x^i y^j`. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn one() -> Self {
        Poly2::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly2::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Poly2::monomial(1, 0, Rational::one())
    }

    pub fn y() -> Self {
        Poly2::monomial(0, 1, Rational::one())
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((u32, u32), Rational)>) -> Self {
        let mut p = Poly2::zero();
        for ((i, j), c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&(i, j)| i == 0 && j == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).max()
    }

    /// Lowest total degree of a term, i.e. the multiplicity at the origin.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, j)| i + j).min()
    }

    /// Largest power of the first variable dividing the polynomial.
    pub fn x_order(&self) -> Option<u32> {
        self.terms.keys().map(|&(i, _)| i).min()
    }

    pub fn y_order(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).min()
    }

    pub fn degree_in_y(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, j)| j).max()
    }

    pub fn homogeneous_part(&self, d: u32) -> Poly2 {
        Poly2::from_terms(
            self.terms
                .iter()
                .filter(|(&(i, j), _)| i + j == d)
                .map(|(&k, c)| (k, c.clone())),
        )
    }

    /// Divides by `x^k`, which must divide exactly.
    pub fn div_x_pow(&self, k: u32) -> Poly2 {
        Poly2::from_terms(self.terms.iter().map(|(&(i, j), c)| {
            assert!(i >= k, "x^{k} does not divide the polynomial");
            ((i - k, j), c.clone())
        }))
    }

    pub fn div_y_pow(&self, k: u32) -> Poly2 {
        Poly2::from_terms(self.terms.iter().map(|(&(i, j), c)| {
            assert!(j >= k, "y^{k} does not divide the polynomial");
            ((i, j - k), c.clone())
        }))
    }

    pub fn scale(&self, c: &Rational) -> Poly2 {
        Poly2::from_terms(self.terms.iter().map(|(&k, a)| (k, a * c)))
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        let mut acc = Poly2::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * pow_q(x, i) * pow_q(y, j);
        }
        acc
    }

    /// `P(px, py)`.
    pub fn compose(&self, px: &Poly2, py: &Poly2) -> Poly2 {
        let dx = self.terms.keys().map(|k| k.0).max().unwrap_or(0);
        let dy = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let xs = powers(px, dx);
        let ys = powers(py, dy);
        let mut acc = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            acc = &acc + &(&xs[i as usize] * &ys[j as usize]).scale(c);
        }
        acc
    }

    /// Coefficients of `y^j` as polynomials in `x`, lowest `j` first.
    pub fn y_coeffs(&self) -> BTreeMap<u32, BTreeMap<u32, Rational>> {
        let mut out: BTreeMap<u32, BTreeMap<u32, Rational>> = BTreeMap::new();
        for (&(i, j), c) in &self.terms {
            out.entry(j).or_default().insert(i, c.clone());
        }
        out
    }

    /// The monomials `x^i y^j` with `i + j <= d`, ordered by total degree
    /// and, within a degree, by decreasing power of `x`.
    pub fn monomials_up_to(d: u32) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for n in 0..=d {
            for i in (0..=n).rev() {
                out.push((i, n - i));
            }
        }
        out
    }

    /// Parses expressions such as `y^2 - x^3 + 1/2*x*y` or `(x-1)(y+2)`.
    pub fn parse(s: &str) -> Result<Poly2, ExactError> {
        let mut p = Parser { s: s.as_bytes(), pos: 0 };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }

    /// Renders with the given variable names.
    pub fn render(&self, xname: &str, yname: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut keys: Vec<&(u32, u32)> = self.terms.keys().collect();
        keys.sort_by_key(|&&(i, j)| (i + j, std::cmp::Reverse(i)));
        let mut out = String::new();
        for (n, &&(i, j)) in keys.iter().enumerate() {
            let c = &self.terms[&(i, j)];
            let neg = c.is_negative();
            let a = c.abs();
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors = Vec::new();
            if !a.is_one() || (i == 0 && j == 0) {
                factors.push(rat_str(&a));
            }
            for (name, e) in [(xname, i), (yname, j)] {
                match e {
                    0 => {}
                    1 => factors.push(name.to_string()),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

fn pow_q(q: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= q;
    }
    acc
}

fn powers(p: &Poly2, n: u32) -> Vec<Poly2> {
    let mut out = vec![Poly2::one()];
    for k in 1..=n as usize {
        let next = &out[k - 1] * p;
        out.push(next);
    }
    out
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render("x", "y"))
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(&-Rational::one())
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), a) in &self.terms {
            for (&(k, l), b) in &rhs.terms {
                out.add_term(i + k, j + l, a * b);
            }
        }
        out
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> ExactError {
        ExactError::Parse(format!("{msg} at column {}", self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly2, ExactError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly2, ExactError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.factor()?;
                }
                Some(c) if c == b'(' || c == b'x' || c == b'y' || c.is_ascii_digit() => {
                    acc = &acc * &self.factor()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Poly2, ExactError> {
        let base = self.base()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let e: u32 = std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| self.err("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Poly2, ExactError> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                Ok(Poly2::x())
            }
            Some(b'y') => {
                self.pos += 1;
                Ok(Poly2::y())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let mut end = self.pos;
                if self.pos < self.s.len() && self.s[self.pos] == b'/' {
                    let save = self.pos;
                    self.pos += 1;
                    let dstart = self.pos;
                    while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                    if self.pos == dstart {
                        self.pos = save;
                    } else {
                        end = self.pos;
                    }
                }
                let text = std::str::from_utf8(&self.s[start..end]).unwrap();
                Ok(Poly2::constant(parse_rational(text)?))
            }
            _ => Err(self.err("expected a number, x, y or '('")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    #[test]
    fn parse_and_render() {
        let p = Poly2::parse("y^2 - x^3").unwrap();
        assert_eq!(p.to_string(), "y^2 - x^3");
        let q = Poly2::parse("(x-1)(y+2)").unwrap();
        assert_eq!(q.to_string(), "-2 + 2*x - y + x*y");
        let r = Poly2::parse("1/2*x*y - 3/4 + 2xy").unwrap();
        assert_eq!(r.coeff(1, 1), rat(5, 2));
        assert_eq!(r.coeff(0, 0), rat(-3, 4));
        assert!(Poly2::parse("x +").is_err());
        assert!(Poly2::parse("z").is_err());
    }

    #[test]
    fn render_parse_round_trip() {
        for s in ["x", "-y + x^2", "1/3 - x*y^2", "y^2 - x^3 - 1"] {
            let p = Poly2::parse(s).unwrap();
            assert_eq!(Poly2::parse(&p.to_string()).unwrap(), p);
        }
    }

    #[test]
    fn composition_and_orders() {
        let p = Poly2::parse("x + y").unwrap();
        let sub = p.compose(&Poly2::x(), &Poly2::parse("x*y + x").unwrap());
        assert_eq!(sub, Poly2::parse("2x + xy").unwrap());
        assert_eq!(sub.order(), Some(1));
        assert_eq!(sub.x_order(), Some(1));
        assert_eq!(Poly2::parse("x^2 y + y^3").unwrap().degree(), Some(3));
    }

    #[test]
    fn monomial_order() {
        assert_eq!(
            Poly2::monomials_up_to(2),
            vec![(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
        );
    }
}
