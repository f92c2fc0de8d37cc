use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ratfunc::RatFunc;
use super::RatError;

/// Row or column label. Tensor products pair labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Pair(Box<Label>, Box<Label>),
    Atom(String),
}

impl Label {
    pub fn atom(s: impl ToString) -> Label {
        Label::Atom(s.to_string())
    }

    pub fn pair(a: Label, b: Label) -> Label {
        Label::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(s) => f.write_str(s),
            Label::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// Integer labels `1..=n`.
pub fn index_labels(n: usize) -> Vec<Label> {
    (1..=n).map(Label::atom).collect()
}

type Row = Vec<(usize, RatFunc)>;

/// Matrix of rational functions with labeled rows and columns.
///
/// Storage is row-sparse; each row keeps its nonzero entries sorted by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledMatrix {
    rows: Vec<Label>,
    cols: Vec<Label>,
    data: Vec<Row>,
}

const PAR_THRESHOLD: usize = 32;

impl LabeledMatrix {
    pub fn zeros(rows: Vec<Label>, cols: Vec<Label>) -> LabeledMatrix {
        let data = vec![Vec::new(); rows.len()];
        LabeledMatrix { rows, cols, data }
    }

    pub fn identity(labels: Vec<Label>) -> LabeledMatrix {
        let n = labels.len();
        let data = (0..n).map(|i| vec![(i, RatFunc::one())]).collect();
        LabeledMatrix { rows: labels.clone(), cols: labels, data }
    }

    pub fn from_fn(
        rows: Vec<Label>,
        cols: Vec<Label>,
        mut f: impl FnMut(usize, usize) -> RatFunc,
    ) -> LabeledMatrix {
        let nc = cols.len();
        let data = (0..rows.len())
            .map(|i| (0..nc).filter_map(|j| Some((j, f(i, j))).filter(|(_, x)| !x.is_zero())).collect())
            .collect();
        LabeledMatrix { rows, cols, data }
    }

    pub fn from_dense(rows: Vec<Label>, cols: Vec<Label>, entries: Vec<Vec<RatFunc>>) -> Result<LabeledMatrix, RatError> {
        if entries.len() != rows.len() || entries.iter().any(|r| r.len() != cols.len()) {
            return Err(RatError::Shape(format!(
                "expected {}x{} entries",
                rows.len(),
                cols.len()
            )));
        }
        Ok(LabeledMatrix::from_fn(rows, cols, |i, j| entries[i][j].clone()))
    }

    pub fn rows(&self) -> &[Label] {
        &self.rows
    }

    pub fn cols(&self) -> &[Label] {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn row_entries(&self, i: usize) -> &[(usize, RatFunc)] {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> RatFunc {
        match self.data[i].binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => RatFunc::zero(),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, x: RatFunc) {
        let row = &mut self.data[i];
        match row.binary_search_by_key(&j, |(c, _)| *c) {
            Ok(k) => {
                if x.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = x;
                }
            }
            Err(k) => {
                if !x.is_zero() {
                    row.insert(k, (j, x));
                }
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<RatFunc>> {
        (0..self.nrows()).map(|i| (0..self.ncols()).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn relabel(mut self, rows: Vec<Label>, cols: Vec<Label>) -> Result<LabeledMatrix, RatError> {
        if rows.len() != self.rows.len() || cols.len() != self.cols.len() {
            return Err(RatError::Shape("relabel size mismatch".into()));
        }
        self.rows = rows;
        self.cols = cols;
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(&RatFunc) -> RatFunc + Sync) -> LabeledMatrix {
        let data = self
            .data
            .iter()
            .map(|r| r.iter().map(|(j, x)| (*j, f(x))).filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        LabeledMatrix { rows: self.rows.clone(), cols: self.cols.clone(), data }
    }

    pub fn scale(&self, c: &RatFunc) -> LabeledMatrix {
        self.map(|x| x * c)
    }

    pub fn transpose(&self) -> LabeledMatrix {
        let mut data: Vec<Row> = vec![Vec::new(); self.ncols()];
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r {
                data[*j].push((i, x.clone()));
            }
        }
        LabeledMatrix { rows: self.cols.clone(), cols: self.rows.clone(), data }
    }

    pub fn mul(&self, other: &LabeledMatrix) -> Result<LabeledMatrix, RatError> {
        if self.cols != other.rows {
            return Err(RatError::LabelMismatch("mul: columns of left != rows of right".into()));
        }
        let row_prod = |r: &Row| -> Row {
            let mut acc: HashMap<usize, RatFunc> = HashMap::new();
            for (k, a) in r {
                for (j, b) in &other.data[*k] {
                    let t = a * b;
                    match acc.get_mut(j) {
                        Some(x) => *x = &*x + &t,
                        None => {
                            acc.insert(*j, t);
                        }
                    }
                }
            }
            let mut out: Row = acc.into_iter().filter(|(_, x)| !x.is_zero()).collect();
            out.sort_by_key(|(j, _)| *j);
            out
        };
        let data: Vec<Row> = if self.nrows() >= PAR_THRESHOLD {
            self.data.par_iter().map(row_prod).collect()
        } else {
            self.data.iter().map(row_prod).collect()
        };
        Ok(LabeledMatrix { rows: self.rows.clone(), cols: other.cols.clone(), data })
    }

    pub fn add(&self, other: &LabeledMatrix) -> Result<LabeledMatrix, RatError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(RatError::LabelMismatch("add: label sets differ".into()));
        }
        let mut out = self.clone();
        for (i, r) in other.data.iter().enumerate() {
            for (j, x) in r {
                let v = &out.get(i, *j) + x;
                out.set(i, *j, v);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LabeledMatrix) -> Result<LabeledMatrix, RatError> {
        self.add(&other.scale(&RatFunc::from_int(-1)))
    }

    pub fn kron(&self, other: &LabeledMatrix) -> LabeledMatrix {
        let pair = |a: &[Label], b: &[Label]| -> Vec<Label> {
            a.iter().flat_map(|x| b.iter().map(move |y| Label::pair(x.clone(), y.clone()))).collect()
        };
        let rows = pair(&self.rows, &other.rows);
        let cols = pair(&self.cols, &other.cols);
        let nb = other.ncols();
        let mut data = Vec::with_capacity(rows.len());
        for ra in &self.data {
            for rb in &other.data {
                let mut row = Vec::with_capacity(ra.len() * rb.len());
                for (ja, a) in ra {
                    for (jb, b) in rb {
                        row.push((ja * nb + jb, a * b));
                    }
                }
                data.push(row);
            }
        }
        LabeledMatrix { rows, cols, data }
    }

    /// Gauss-Jordan inverse. Rows of the result carry the column labels of `self`.
    pub fn inv(&self) -> Result<LabeledMatrix, RatError> {
        let n = self.nrows();
        if n != self.ncols() {
            return Err(RatError::Shape("inverse of a non-square matrix".into()));
        }
        let mut a = self.to_dense();
        let mut b: Vec<Vec<RatFunc>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() }).collect()).collect();
        for col in 0..n {
            let piv = (col..n)
                .filter(|&r| !a[r][col].is_zero())
                .min_by_key(|&r| a[r][col].num().num_terms() + a[r][col].den().num_terms())
                .ok_or(RatError::Singular)?;
            a.swap(col, piv);
            b.swap(col, piv);
            let pinv = a[col][col].inv()?;
            for j in 0..n {
                if !a[col][j].is_zero() {
                    a[col][j] = &a[col][j] * &pinv;
                }
                if !b[col][j].is_zero() {
                    b[col][j] = &b[col][j] * &pinv;
                }
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    if !a[col][j].is_zero() {
                        a[r][j] = &a[r][j] - &(&f * &a[col][j]);
                    }
                    if !b[col][j].is_zero() {
                        b[r][j] = &b[r][j] - &(&f * &b[col][j]);
                    }
                }
            }
        }
        LabeledMatrix::from_dense(self.cols.clone(), self.rows.clone(), b)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && self.data.iter().enumerate().all(|(i, r)| r.len() == 1 && r[0].0 == i && r[0].1.is_one())
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            rows: self.rows.clone(),
            cols: self.cols.clone(),
            entries: self.to_dense().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<LabeledMatrix, RatError> {
        let entries = j
            .entries
            .iter()
            .map(|r| r.iter().map(|s| s.parse()).collect::<Result<Vec<RatFunc>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        LabeledMatrix::from_dense(j.rows.clone(), j.cols.clone(), entries)
    }
}

/// JSON wire form of a [`LabeledMatrix`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: Vec<Label>,
    pub cols: Vec<Label>,
    pub entries: Vec<Vec<String>>,
}

impl Serialize for LabeledMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabeledMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<LabeledMatrix, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        LabeledMatrix::from_json(&j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> RatFunc {
        s.parse().unwrap()
    }

    fn ones(n: usize) -> LabeledMatrix {
        LabeledMatrix::from_fn(index_labels(n), index_labels(n), |_, _| RatFunc::one())
    }

    #[test]
    fn kron_of_identities() {
        let i = LabeledMatrix::identity(index_labels(3));
        let k = i.kron(&i);
        assert!(k.is_identity());
        assert_eq!(k.rows()[4], Label::pair(Label::atom(2), Label::atom(2)));
    }

    #[test]
    fn all_ones_squares_to_multiple() {
        let j = ones(4);
        assert_eq!(j.mul(&j).unwrap(), j.scale(&RatFunc::from_int(4)));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = LabeledMatrix::from_dense(
            index_labels(2),
            index_labels(2),
            vec![vec![p("u"), p("h")], vec![p("1"), p("u + h")]],
        )
        .unwrap();
        let inv = m.inv().unwrap();
        assert!(m.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&m).unwrap().is_identity());
    }

    #[test]
    fn singular_is_reported() {
        assert!(matches!(ones(3).inv(), Err(RatError::Singular)));
    }

    #[test]
    fn label_mismatch() {
        let a = LabeledMatrix::identity(index_labels(2));
        let b = LabeledMatrix::identity(vec![Label::atom("x"), Label::atom("y")]);
        assert!(a.mul(&b).is_err());
        assert!(a.add(&b).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = LabeledMatrix::from_fn(index_labels(2), index_labels(2), |i, j| {
            if i == j { p("u / (u + h)") } else { p("h / (u + h)") }
        })
        .kron(&LabeledMatrix::identity(index_labels(1)));
        let s = serde_json::to_string(&m).unwrap();
        let back: LabeledMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}
