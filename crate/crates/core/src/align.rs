//! Global sequence alignment with affine gap costs.
//!
//! Three tables are filled side by side: alignments of the two prefixes
//! ending in an aligned pair, ending in a blank over the second sequence,
//! and ending in a blank under the first sequence. A gap is a maximal run of
//! blanks in one row and costs `a + b k`.

use crate::cost::{sat_add, Cost, CostModel, Rational, Weights, INF};
use crate::error::Result;

/// One alignment column: positions in the first and second sequence, `None`
/// for a blank. `(None, None)` never occurs.
pub type Column = (Option<usize>, Option<usize>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub distance: Rational,
    pub columns: Vec<Column>,
}

impl Alignment {
    /// The two rows as text with `-` for blanks and symbols joined by
    /// `separator`.
    pub fn rows<S: AsRef<str>>(&self, s1: &[S], s2: &[S], separator: &str) -> (String, String) {
        let render = |pos: Option<usize>, seq: &[S]| -> String {
            match pos {
                Some(i) => {
                    let sym = seq[i].as_ref();
                    let width = 1.max(sym.chars().count());
                    format!("{sym:<width$}")
                }
                None => "-".to_string(),
            }
        };
        let mut top = Vec::with_capacity(self.columns.len());
        let mut bottom = Vec::with_capacity(self.columns.len());
        for &(i, j) in &self.columns {
            let (mut a, mut b) = (render(i, s1), render(j, s2));
            let width = a.chars().count().max(b.chars().count());
            a = format!("{a:<width$}");
            b = format!("{b:<width$}");
            top.push(a);
            bottom.push(b);
        }
        (
            top.join(separator).trim_end().to_string(),
            bottom.join(separator).trim_end().to_string(),
        )
    }
}

/// The three cost tables, each `(m + 1) x (n + 1)`.
#[derive(Debug, Clone)]
pub struct AlignTables {
    m: usize,
    n: usize,
    weights: Weights,
    matched: Vec<i64>,
    blank_first: Vec<i64>,
    blank_second: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Matched,
    BlankFirst,
    BlankSecond,
}

impl AlignTables {
    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    /// Best cost over alignments of the prefixes ending with `i` aligned to `j`.
    pub fn matched(&self, i: usize, j: usize) -> Cost {
        self.weights.to_cost(self.matched[self.at(i, j)])
    }

    /// Best cost over alignments ending with a blank over position `j`
    /// of the second sequence.
    pub fn blank_first(&self, i: usize, j: usize) -> Cost {
        self.weights.to_cost(self.blank_first[self.at(i, j)])
    }

    /// Best cost over alignments ending with position `i` of the first
    /// sequence over a blank.
    pub fn blank_second(&self, i: usize, j: usize) -> Cost {
        self.weights.to_cost(self.blank_second[self.at(i, j)])
    }

    pub fn distance(&self) -> Rational {
        let k = self.at(self.m, self.n);
        let best = self.matched[k].min(self.blank_first[k]).min(self.blank_second[k]);
        self.weights.to_rational(best)
    }

    fn value(&self, state: State, i: usize, j: usize) -> i64 {
        let k = self.at(i, j);
        match state {
            State::Matched => self.matched[k],
            State::BlankFirst => self.blank_first[k],
            State::BlankSecond => self.blank_second[k],
        }
    }

    /// Witness alignment. Ties prefer an aligned pair, then a blank in the
    /// second row, then a blank in the first row.
    fn traceback(&self) -> Vec<Column> {
        const PREFERENCE: [State; 3] = [State::Matched, State::BlankSecond, State::BlankFirst];
        let w = &self.weights;
        let open = w.open + w.extend;
        let (mut i, mut j) = (self.m, self.n);
        if i == 0 && j == 0 {
            return Vec::new();
        }
        let target = |s: State| self.value(s, i, j);
        let best = PREFERENCE.iter().map(|&s| target(s)).min().unwrap_or(INF);
        let mut state = PREFERENCE.into_iter().find(|&s| target(s) == best).unwrap();
        let mut columns = Vec::with_capacity(self.m + self.n);
        while i > 0 || j > 0 {
            let here = self.value(state, i, j);
            let (pi, pj, step): (usize, usize, [i64; 3]) = match state {
                State::Matched => {
                    columns.push((Some(i - 1), Some(j - 1)));
                    let p = w.relabel(i - 1, j - 1);
                    (i - 1, j - 1, [p, p, p])
                }
                State::BlankFirst => {
                    columns.push((None, Some(j - 1)));
                    (i, j - 1, [open, open, w.extend])
                }
                State::BlankSecond => {
                    columns.push((Some(i - 1), None));
                    (i - 1, j, [open, w.extend, open])
                }
            };
            // step[k] is the cost added when coming from PREFERENCE[k].
            state = PREFERENCE
                .iter()
                .zip(step)
                .find(|&(&s, c)| sat_add(self.value(s, pi, pj), c) == here)
                .map(|(&s, _)| s)
                .expect("traceback lost the optimal path");
            i = pi;
            j = pj;
        }
        columns.reverse();
        columns
    }
}

/// Fills the three tables for `s1` against `s2`.
pub fn align_tables<S: AsRef<str>>(s1: &[S], s2: &[S], model: &CostModel) -> Result<AlignTables> {
    let weights = model.weights(s1.iter().map(AsRef::as_ref), s2.iter().map(AsRef::as_ref))?;
    let (m, n) = (s1.len(), s2.len());
    let width = n + 1;
    let size = (m + 1) * width;
    let mut matched = vec![INF; size];
    let mut blank_first = vec![INF; size];
    let mut blank_second = vec![INF; size];
    let (open, extend) = (weights.open + weights.extend, weights.extend);

    matched[0] = 0;
    for (j, cell) in blank_first.iter_mut().enumerate().take(n + 1).skip(1) {
        *cell = weights.gap(j);
    }
    for i in 1..=m {
        blank_second[i * width] = weights.gap(i);
    }
    for i in 1..=m {
        for j in 1..=n {
            let k = i * width + j;
            let diag = k - width - 1;
            let best_diag = matched[diag].min(blank_first[diag]).min(blank_second[diag]);
            matched[k] = sat_add(best_diag, weights.relabel(i - 1, j - 1));

            let left = k - 1;
            blank_first[k] = sat_add(matched[left], open)
                .min(sat_add(blank_first[left], extend))
                .min(sat_add(blank_second[left], open));

            let up = k - width;
            blank_second[k] = sat_add(matched[up], open)
                .min(sat_add(blank_first[up], open))
                .min(sat_add(blank_second[up], extend));
        }
    }
    Ok(AlignTables {
        m,
        n,
        weights,
        matched,
        blank_first,
        blank_second,
    })
}

/// Optimal global alignment of `s1` and `s2` under affine gap costs.
pub fn align<S: AsRef<str>>(s1: &[S], s2: &[S], model: &CostModel) -> Result<Alignment> {
    let tables = align_tables(s1, s2, model)?;
    Ok(Alignment {
        distance: tables.distance(),
        columns: tables.traceback(),
    })
}

/// Cost of a given alignment: relabel costs of aligned pairs plus `a + b k`
/// for every maximal run of `k` blanks in either row.
pub fn alignment_cost<S: AsRef<str>>(
    s1: &[S],
    s2: &[S],
    columns: &[Column],
    model: &CostModel,
) -> Result<Rational> {
    let mut total = Rational::from_integer(0);
    let mut run_first = 0;
    let mut run_second = 0;
    for &(i, j) in columns {
        match (i, j) {
            (Some(i), Some(j)) => {
                total += model.relabel_cost(Some(s1[i].as_ref()), Some(s2[j].as_ref()))?;
            }
            (None, Some(_)) => {
                total += model.gap_cost(run_second);
                run_second = 0;
                run_first += 1;
                continue;
            }
            (Some(_), None) => {
                total += model.gap_cost(run_first);
                run_first = 0;
                run_second += 1;
                continue;
            }
            (None, None) => {}
        }
        total += model.gap_cost(run_first) + model.gap_cost(run_second);
        run_first = 0;
        run_second = 0;
    }
    Ok(total + model.gap_cost(run_first) + model.gap_cost(run_second))
}

/// Splits a string into one-character symbols.
pub fn symbols(text: &str) -> Vec<String> {
    text.chars().map(String::from).collect()
}
