//! JSON encodings for complex scalars (`[re, im]`) and complex matrices (row-major nested
//! arrays of `[re, im]`).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg::{c64, CMat, C64};

pub type Pair = [f64; 2];

pub fn to_pair(z: C64) -> Pair {
    [z.re, z.im]
}

pub fn from_pair(p: Pair) -> C64 {
    c64(p[0], p[1])
}

pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| to_pair(m[(i, j)])).collect()).collect()
}

pub fn rows_to_matrix(rows: &[Vec<Pair>], what: &str) -> Result<CMat, String> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(format!("matrix {what} has ragged rows"));
    }
    Ok(CMat::from_fn(nrows, ncols, |i, j| from_pair(rows[i][j])))
}

pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        to_pair(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        Pair::deserialize(d).map(from_pair)
    }
}

pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<Pair> = v.iter().copied().map(to_pair).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        Vec::<Pair>::deserialize(d).map(|v| v.into_iter().map(from_pair).collect())
    }
}
