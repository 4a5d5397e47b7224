//! Cost model shared by every distance: relabel metric, blank symbol and the
//! affine gap function `w(k) = a + b k`.
//!
//! All costs are exact rationals. The dynamic programs work on integers
//! scaled by the common denominator of every input cost ([`Weights`]), so
//! their results compare bit-exactly with the enumeration oracle.

use std::collections::HashMap;
use std::fmt;
use std::ops::Add;

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::Rational64;

/// Cost extended with `+∞`. Adding anything to `Infinite` stays infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cost {
    Finite(Rational),
    Infinite,
}

impl Cost {
    pub const ZERO: Cost = Cost::Finite(Rational::new_raw(0, 1));

    pub fn finite(&self) -> Option<Rational> {
        match self {
            Cost::Finite(r) => Some(*r),
            Cost::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Cost::Infinite)
    }
}

impl From<Rational> for Cost {
    fn from(r: Rational) -> Self {
        Cost::Finite(r)
    }
}

impl From<i64> for Cost {
    fn from(v: i64) -> Self {
        Cost::Finite(Rational::from_integer(v))
    }
}

impl Add for Cost {
    type Output = Cost;

    fn add(self, rhs: Cost) -> Cost {
        match (self, rhs) {
            (Cost::Finite(a), Cost::Finite(b)) => Cost::Finite(a + b),
            _ => Cost::Infinite,
        }
    }
}

impl Add<Rational> for Cost {
    type Output = Cost;

    fn add(self, rhs: Rational) -> Cost {
        self + Cost::Finite(rhs)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cost::Finite(r) => f.write_str(&format_rational(r)),
            Cost::Infinite => f.write_str("inf"),
        }
    }
}

/// Lowest terms, `n` for integers and `n/d` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Accepts integers, `n/d` fractions and plain decimals such as `2.75`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidCost(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let whole_val: i64 = if whole_digits.is_empty() {
            0
        } else {
            whole_digits.parse().map_err(|_| bad())?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac_val: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = whole_val
            .checked_mul(scale)
            .and_then(|w| w.checked_add(frac_val))
            .ok_or_else(bad)?;
        return Ok(Rational::new(if negative { -magnitude } else { magnitude }, scale));
    }
    text.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

/// Relabel metric `p`. `Unit` charges 0 for equal symbols and 1 otherwise,
/// including against the blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Relabel {
    Unit,
    Table(RelabelTable),
}

/// Explicit relabel metric over an alphabet plus the blank symbol.
///
/// Validated at construction: symmetric, zero exactly on the diagonal, and
/// satisfying the triangle inequality over the alphabet and the blank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelabelTable {
    alphabet: Vec<String>,
    index: HashMap<String, usize>,
    // (k + 1) x (k + 1); slot k is the blank.
    costs: Vec<Rational>,
}

/// Spellings of the blank symbol accepted in cost table files.
pub const BLANK_SPELLINGS: [&str; 2] = ["-", "λ"];

impl RelabelTable {
    /// Builds and validates a table. Entries name symbols of `alphabet` or the
    /// blank (`None`). A pair given in one direction only is mirrored; the
    /// diagonal defaults to 0 and missing blank entries default to 1.
    pub fn new<S: AsRef<str>>(
        alphabet: &[S],
        entries: &[(Option<&str>, Option<&str>, Rational)],
    ) -> Result<Self> {
        let alphabet: Vec<String> = alphabet.iter().map(|s| s.as_ref().to_string()).collect();
        let k = alphabet.len();
        let mut index = HashMap::new();
        for (i, s) in alphabet.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidCost(format!("symbol {s:?} listed twice")));
            }
        }
        let width = k + 1;
        let slot = |s: Option<&str>| -> Result<usize> {
            match s {
                None => Ok(k),
                Some(s) => index.get(s).copied().ok_or_else(|| Error::UnknownSymbol(s.to_string())),
            }
        };
        let mut given: Vec<Option<Rational>> = vec![None; width * width];
        for &(x, y, c) in entries {
            let (i, j) = (slot(x)?, slot(y)?);
            if given[i * width + j].is_some_and(|prev| prev != c) {
                return Err(Error::InvalidCost(format!(
                    "conflicting entries for ({}, {})",
                    name(&alphabet, i),
                    name(&alphabet, j)
                )));
            }
            given[i * width + j] = Some(c);
        }

        let mut costs = vec![Rational::zero(); width * width];
        for i in 0..width {
            for j in 0..width {
                let here = given[i * width + j];
                let mirror = given[j * width + i];
                if let (Some(xy), Some(yx)) = (here, mirror) {
                    if xy != yx {
                        return Err(Error::Asymmetric {
                            x: name(&alphabet, i),
                            y: name(&alphabet, j),
                            xy: format_rational(&xy),
                            yx: format_rational(&yx),
                        });
                    }
                }
                costs[i * width + j] = match here.or(mirror) {
                    Some(c) => c,
                    None if i == j => Rational::zero(),
                    None if i == k || j == k => Rational::from_integer(1),
                    None => return Err(Error::MissingEntry(name(&alphabet, i), name(&alphabet, j))),
                };
            }
        }

        for i in 0..width {
            for j in 0..width {
                let c = costs[i * width + j];
                if (i == j) != c.is_zero() || c.is_negative() {
                    return Err(Error::NotPositiveDefinite {
                        x: name(&alphabet, i),
                        y: name(&alphabet, j),
                        value: format_rational(&c),
                    });
                }
            }
        }
        for x in 0..width {
            for y in 0..width {
                for z in 0..width {
                    if costs[x * width + z] > costs[x * width + y] + costs[y * width + z] {
                        return Err(Error::TriangleViolation {
                            x: name(&alphabet, x),
                            y: name(&alphabet, y),
                            z: name(&alphabet, z),
                        });
                    }
                }
            }
        }
        Ok(RelabelTable {
            alphabet,
            index,
            costs,
        })
    }

    /// Parses the cost table file format:
    ///
    /// ```text
    /// alphabet: a,b,c
    /// a,b,1
    /// a,-,3/2
    /// ```
    ///
    /// `-` (or `λ`) names the blank. Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(n, l)| (n + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines.next().ok_or(Error::CostTableSyntax {
            line: 1,
            message: "missing alphabet header".into(),
        })?;
        let symbols = header
            .strip_prefix("alphabet:")
            .ok_or_else(|| Error::CostTableSyntax {
                line: line_no,
                message: "expected \"alphabet: <symbols>\"".into(),
            })?;
        let alphabet: Vec<String> = symbols
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if let Some(bad) = alphabet
            .iter()
            .find(|s| !crate::tree::is_valid_label(s))
        {
            return Err(Error::CostTableSyntax {
                line: line_no,
                message: format!("invalid symbol {bad:?}"),
            });
        }

        let mut raw = Vec::new();
        for (line, text) in lines {
            let fields: Vec<&str> = text.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::CostTableSyntax {
                    line,
                    message: "expected \"x,y,cost\"".into(),
                });
            }
            let cost = parse_rational(fields[2]).map_err(|e| Error::CostTableSyntax {
                line,
                message: e.to_string(),
            })?;
            raw.push((fields[0].to_string(), fields[1].to_string(), cost));
        }
        fn sym(s: &str) -> Option<&str> {
            if BLANK_SPELLINGS.contains(&s) {
                None
            } else {
                Some(s)
            }
        }
        let entries: Vec<_> = raw
            .iter()
            .map(|(x, y, c)| (sym(x), sym(y), *c))
            .collect();
        RelabelTable::new(&alphabet, &entries)
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// `p(x, y)` where `None` is the blank.
    pub fn get(&self, x: Option<&str>, y: Option<&str>) -> Result<Rational> {
        let k = self.alphabet.len();
        let slot = |s: Option<&str>| -> Result<usize> {
            match s {
                None => Ok(k),
                Some(s) => self
                    .index
                    .get(s)
                    .copied()
                    .ok_or_else(|| Error::UnknownSymbol(s.to_string())),
            }
        };
        Ok(self.costs[slot(x)? * (k + 1) + slot(y)?])
    }
}

fn name(alphabet: &[String], i: usize) -> String {
    alphabet.get(i).cloned().unwrap_or_else(|| "-".to_string())
}

/// Relabel metric plus affine gap parameters.
///
/// The classic distance prices deletions and insertions through the relabel
/// metric against the blank (or through an explicit indel cost, if set); the
/// gap distances price unmatched nodes through `w(k) = a + b k` instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostModel {
    relabel: Relabel,
    gap_open: Rational,
    gap_extend: Rational,
    indel: Option<Rational>,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::unit()
    }
}

impl CostModel {
    /// Unit relabel metric with `a = 0`, `b = 1`.
    pub fn unit() -> Self {
        CostModel {
            relabel: Relabel::Unit,
            gap_open: Rational::zero(),
            gap_extend: Rational::from_integer(1),
            indel: None,
        }
    }

    /// Unit relabel metric with gap cost `a + b k`. Requires `a >= 0` and
    /// `b > 0`, which makes the gap function convex.
    pub fn affine(gap_open: Rational, gap_extend: Rational) -> Result<Self> {
        CostModel::unit().with_gaps(gap_open, gap_extend)
    }

    pub fn with_gaps(mut self, gap_open: Rational, gap_extend: Rational) -> Result<Self> {
        if gap_open.is_negative() {
            return Err(Error::InvalidCost(format!(
                "gap open cost must be >= 0, got {}",
                format_rational(&gap_open)
            )));
        }
        if !gap_extend.is_positive() {
            return Err(Error::InvalidCost(format!(
                "gap extend cost must be > 0, got {}",
                format_rational(&gap_extend)
            )));
        }
        self.gap_open = gap_open;
        self.gap_extend = gap_extend;
        Ok(self)
    }

    pub fn with_relabel(mut self, relabel: Relabel) -> Self {
        self.relabel = relabel;
        self
    }

    /// Overrides the classic deletion and insertion cost for every symbol.
    pub fn with_indel_cost(mut self, cost: Rational) -> Result<Self> {
        if !cost.is_positive() {
            return Err(Error::InvalidCost(format!(
                "indel cost must be > 0, got {}",
                format_rational(&cost)
            )));
        }
        self.indel = Some(cost);
        Ok(self)
    }

    pub fn relabel(&self) -> &Relabel {
        &self.relabel
    }

    pub fn gap_open(&self) -> Rational {
        self.gap_open
    }

    pub fn gap_extend(&self) -> Rational {
        self.gap_extend
    }

    /// `w(k)`: zero for an empty gap, `a + b k` otherwise.
    pub fn gap_cost(&self, k: usize) -> Rational {
        if k == 0 {
            Rational::zero()
        } else {
            self.gap_open + self.gap_extend * Rational::from_integer(k as i64)
        }
    }

    /// `γ(x → y)` with `None` standing for the blank.
    pub fn relabel_cost(&self, x: Option<&str>, y: Option<&str>) -> Result<Rational> {
        if let (Some(indel), true) = (self.indel, x.is_none() != y.is_none()) {
            return Ok(indel);
        }
        match &self.relabel {
            Relabel::Unit => Ok(if x == y { Rational::zero() } else { Rational::from_integer(1) }),
            Relabel::Table(table) => table.get(x, y),
        }
    }

    /// Integer-scaled costs for one pair of label sequences.
    pub(crate) fn weights<'a>(
        &self,
        labels1: impl IntoIterator<Item = &'a str>,
        labels2: impl IntoIterator<Item = &'a str>,
    ) -> Result<Weights> {
        let labels1: Vec<&str> = labels1.into_iter().collect();
        let labels2: Vec<&str> = labels2.into_iter().collect();
        let (m, n) = (labels1.len(), labels2.len());
        if matches!(self.relabel, Relabel::Unit) {
            return Ok(self.unit_weights(&labels1, &labels2));
        }
        let mut relabel = Vec::with_capacity(m * n);
        for x in &labels1 {
            for y in &labels2 {
                relabel.push(self.relabel_cost(Some(x), Some(y))?);
            }
        }
        let delete: Vec<Rational> = labels1
            .iter()
            .map(|x| self.relabel_cost(Some(x), None))
            .collect::<Result<_>>()?;
        let insert: Vec<Rational> = labels2
            .iter()
            .map(|y| self.relabel_cost(None, Some(y)))
            .collect::<Result<_>>()?;

        let scale = relabel
            .iter()
            .chain(&delete)
            .chain(&insert)
            .chain([&self.gap_open, &self.gap_extend])
            .fold(1i64, |acc, r| acc.lcm(r.denom()));
        let to_int = |r: &Rational| -> i64 { (r * Rational::from_integer(scale)).to_integer() };
        Ok(Weights {
            scale,
            n,
            relabel: relabel.iter().map(to_int).collect(),
            delete: delete.iter().map(to_int).collect(),
            insert: insert.iter().map(to_int).collect(),
            open: to_int(&self.gap_open),
            extend: to_int(&self.gap_extend),
        })
    }
}

impl CostModel {
    fn unit_weights(&self, labels1: &[&str], labels2: &[&str]) -> Weights {
        let indel = self.indel.unwrap_or_else(|| Rational::from_integer(1));
        let scale = [self.gap_open, self.gap_extend, indel]
            .iter()
            .fold(1i64, |acc, r| acc.lcm(r.denom()));
        let to_int = |r: Rational| (r * Rational::from_integer(scale)).to_integer();
        let indel = to_int(indel);
        let relabel = labels1
            .iter()
            .flat_map(|x| labels2.iter().map(move |y| if x == y { 0 } else { scale }))
            .collect();
        Weights {
            scale,
            n: labels2.len(),
            relabel,
            delete: vec![indel; labels1.len()],
            insert: vec![indel; labels2.len()],
            open: to_int(self.gap_open),
            extend: to_int(self.gap_extend),
        }
    }
}

/// Sentinel for `+∞` in integer tables. Far from overflow under addition of
/// a handful of finite costs.
pub(crate) const INF: i64 = i64::MAX / 4;

#[inline]
pub(crate) fn sat_add(a: i64, b: i64) -> i64 {
    if a >= INF || b >= INF {
        INF
    } else {
        (a + b).min(INF)
    }
}

/// Costs for one tree (or sequence) pair, multiplied by `scale` so every
/// value is an integer. Indices follow the label order given to
/// [`CostModel::weights`].
#[derive(Debug, Clone)]
pub(crate) struct Weights {
    pub scale: i64,
    n: usize,
    relabel: Vec<i64>,
    pub delete: Vec<i64>,
    pub insert: Vec<i64>,
    pub open: i64,
    pub extend: i64,
}

impl Weights {
    #[inline]
    pub fn relabel(&self, i: usize, j: usize) -> i64 {
        self.relabel[i * self.n + j]
    }

    /// `w(k)` in scaled units.
    #[inline]
    pub fn gap(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.open + self.extend * k as i64
        }
    }

    pub fn to_cost(&self, v: i64) -> Cost {
        if v >= INF {
            Cost::Infinite
        } else {
            Cost::Finite(Rational::new(v, self.scale))
        }
    }

    pub fn to_rational(&self, v: i64) -> Rational {
        debug_assert!(v < INF);
        Rational::new(v, self.scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{rngs::StdRng, Rng, SeedableRng};

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn gap_cost_examples() {
        let model = CostModel::affine(r(2, 1), r(3, 1)).unwrap();
        assert_eq!(model.gap_cost(0), r(0, 1));
        assert_eq!(model.gap_cost(1), r(5, 1));
    }

    #[test]
    fn gap_cost_is_convex_for_random_parameters() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..100 {
            let a = r(rng.random_range(0..50), rng.random_range(1..10));
            let b = r(rng.random_range(1..50), rng.random_range(1..10));
            let model = CostModel::affine(a, b).unwrap();
            assert!(model.gap_cost(5) <= model.gap_cost(2) + model.gap_cost(3));
        }
    }

    #[test]
    fn gap_cost_subadditive_exhaustive() {
        let model = CostModel::affine(r(3, 2), r(1, 3)).unwrap();
        for k1 in 1..=64 {
            for k2 in 1..=64 {
                assert!(model.gap_cost(k1 + k2) <= model.gap_cost(k1) + model.gap_cost(k2));
            }
        }
    }

    #[test]
    fn affine_rejects_bad_parameters() {
        assert!(CostModel::affine(r(-1, 1), r(1, 1)).is_err());
        assert!(CostModel::affine(r(0, 1), r(0, 1)).is_err());
        assert!(CostModel::affine(r(0, 1), r(1, 100)).is_ok());
    }

    #[test]
    fn unit_relabel_examples() {
        let model = CostModel::unit();
        assert_eq!(model.relabel_cost(Some("a"), Some("a")).unwrap(), r(0, 1));
        assert_eq!(model.relabel_cost(Some("a"), Some("b")).unwrap(), r(1, 1));
        assert_eq!(model.relabel_cost(Some("a"), None).unwrap(), r(1, 1));
        let model = model.with_indel_cost(r(3, 1)).unwrap();
        assert_eq!(model.relabel_cost(None, Some("b")).unwrap(), r(3, 1));
        assert_eq!(model.relabel_cost(Some("a"), Some("b")).unwrap(), r(1, 1));
    }

    #[test]
    fn rational_parsing_and_printing() {
        assert_eq!(parse_rational("3").unwrap(), r(3, 1));
        assert_eq!(parse_rational("6/4").unwrap(), r(3, 2));
        assert_eq!(parse_rational("2.75").unwrap(), r(11, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), r(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert_eq!(format_rational(&r(6, 4)), "3/2");
        assert_eq!(format_rational(&r(8, 4)), "2");
        assert_eq!(Cost::Infinite.to_string(), "inf");
    }

    #[test]
    fn infinity_saturates() {
        assert_eq!(Cost::Infinite + Cost::from(3), Cost::Infinite);
        assert!(Cost::from(1_000_000) < Cost::Infinite);
        assert_eq!(sat_add(INF, 5), INF);
        assert_eq!(sat_add(INF - 1, 5), INF);
    }

    #[test]
    fn table_parses_and_validates() {
        let table = RelabelTable::parse("alphabet: a,b\na,b,1/2\na,-,1\nb,λ,1\n").unwrap();
        assert_eq!(table.get(Some("b"), Some("a")).unwrap(), r(1, 2));
        assert_eq!(table.get(Some("a"), Some("a")).unwrap(), r(0, 1));
        assert_eq!(table.get(None, Some("b")).unwrap(), r(1, 1));
        assert!(matches!(table.get(Some("c"), None), Err(Error::UnknownSymbol(_))));
    }

    #[test]
    fn table_rejects_non_metrics() {
        let asym = RelabelTable::parse("alphabet: a,b\na,b,1\nb,a,2\n");
        assert!(matches!(asym, Err(Error::Asymmetric { .. })), "{asym:?}");

        let zero = RelabelTable::parse("alphabet: a,b\na,b,0\n");
        assert!(matches!(zero, Err(Error::NotPositiveDefinite { .. })), "{zero:?}");

        let diag = RelabelTable::parse("alphabet: a,b\na,a,1\na,b,1\n");
        assert!(matches!(diag, Err(Error::NotPositiveDefinite { .. })), "{diag:?}");

        let tri = RelabelTable::parse("alphabet: a,b,c\na,b,1\nb,c,1\na,c,3\n");
        assert!(matches!(tri, Err(Error::TriangleViolation { .. })), "{tri:?}");

        let missing = RelabelTable::parse("alphabet: a,b,c\na,b,1\nb,c,1\n");
        assert!(matches!(missing, Err(Error::MissingEntry(..))), "{missing:?}");

        let header = RelabelTable::parse("a,b,1\n");
        assert!(matches!(header, Err(Error::CostTableSyntax { line: 1, .. })));
    }

    #[test]
    fn weights_scale_to_integers() {
        let model = CostModel::affine(r(1, 2), r(1, 3)).unwrap();
        let w = model.weights(["a", "b"], ["b"]).unwrap();
        assert_eq!(w.scale, 6);
        assert_eq!((w.relabel(0, 0), w.relabel(1, 0)), (6, 0));
        assert_eq!((w.open, w.extend), (3, 2));
        assert_eq!(w.to_rational(w.gap(2)), r(7, 6));
    }
}
