//! Objects of the base category: finite sets and their cartesian products.
//!
//! A [`TensorObj`] is a flat list of atomic factors. Tensoring concatenates
//! the lists, so associators and unitors are identities. Elements are
//! addressed by a single mixed-radix index with the first factor most
//! significant, which makes `index(x ⊗ y) = index(x) * |Y| + index(y)` for
//! any split of the factor list.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of an element of a [`TensorObj`].
pub type Elem = usize;

#[derive(Debug, PartialEq, Eq, Hash)]
struct AtomData {
    name: String,
    elements: Vec<String>,
}

/// A named finite set with ordered, pairwise distinct element labels.
#[derive(Clone)]
pub struct AtomObj(Arc<AtomData>);

fn valid_token(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| {
            !c.is_whitespace() && !matches!(c, '(' | ')' | ',' | '#' | '=' | '[' | ']' | '*')
        })
        && !s.contains("->")
}

impl AtomObj {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        elements: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        if !valid_token(&name) {
            return Err(Error::InvalidObject(format!("bad set name {name:?}")));
        }
        let elements: Vec<String> = elements.into_iter().map(Into::into).collect();
        for (i, e) in elements.iter().enumerate() {
            if !valid_token(e) {
                return Err(Error::InvalidObject(format!(
                    "bad element label {e:?} in set {name}"
                )));
            }
            if elements[..i].contains(e) {
                return Err(Error::InvalidObject(format!(
                    "duplicate element {e:?} in set {name}"
                )));
            }
        }
        Ok(AtomObj(Arc::new(AtomData { name, elements })))
    }

    /// The set `{0, 1, ..., n-1}`.
    pub fn range(name: impl Into<String>, n: usize) -> Self {
        Self::new(name, (0..n).map(|i| i.to_string())).expect("numeric labels are valid")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn elements(&self) -> &[String] {
        &self.0.elements
    }

    pub fn len(&self) -> usize {
        self.0.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.elements.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.0.elements.iter().position(|e| e == label)
    }
}

impl PartialEq for AtomObj {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for AtomObj {}

impl std::hash::Hash for AtomObj {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for AtomObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name(), self.elements().join(","))
    }
}

/// A tensor product of atomic sets. The empty product is the unit `I`.
#[derive(Clone)]
pub struct TensorObj {
    factors: Arc<[AtomObj]>,
    size: usize,
}

impl TensorObj {
    pub fn unit() -> Self {
        Self::from_factors(Vec::new())
    }

    pub fn from_factors(factors: Vec<AtomObj>) -> Self {
        let size = factors.iter().map(AtomObj::len).product();
        TensorObj {
            factors: factors.into(),
            size,
        }
    }

    pub fn factors(&self) -> &[AtomObj] {
        &self.factors
    }

    pub fn is_unit(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of elements (tuples).
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn tensor(&self, other: &TensorObj) -> TensorObj {
        if other.is_unit() {
            return self.clone();
        }
        if self.is_unit() {
            return other.clone();
        }
        let mut factors = self.factors.to_vec();
        factors.extend(other.factors.iter().cloned());
        TensorObj {
            factors: factors.into(),
            size: self.size * other.size,
        }
    }

    /// Tensor of a sequence of objects, left to right.
    pub fn product<'a>(objs: impl IntoIterator<Item = &'a TensorObj>) -> TensorObj {
        objs.into_iter()
            .fold(TensorObj::unit(), |acc, o| acc.tensor(o))
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.size
    }

    /// Per-factor coordinates of an element.
    pub fn coords(&self, mut x: Elem) -> Vec<usize> {
        let mut out = vec![0; self.factors.len()];
        for (slot, f) in out.iter_mut().zip(self.factors.iter()).rev() {
            *slot = x % f.len();
            x /= f.len();
        }
        out
    }

    pub fn from_coords(&self, coords: &[usize]) -> Option<Elem> {
        if coords.len() != self.factors.len() {
            return None;
        }
        let mut x = 0;
        for (&c, f) in coords.iter().zip(self.factors.iter()) {
            if c >= f.len() {
                return None;
            }
            x = x * f.len() + c;
        }
        Some(x)
    }

    /// Renders an element: `()` for the unit, the bare label for a single
    /// factor, and `(l1,l2,...)` otherwise.
    pub fn render(&self, x: Elem) -> String {
        let coords = self.coords(x);
        match self.factors.len() {
            1 => self.factors[0].elements()[coords[0]].clone(),
            _ => {
                let labels: Vec<&str> = coords
                    .iter()
                    .zip(self.factors.iter())
                    .map(|(&c, f)| f.elements()[c].as_str())
                    .collect();
                format!("({})", labels.join(","))
            }
        }
    }

    /// Inverse of [`render`](Self::render). A single-factor element may also
    /// be written in parentheses.
    pub fn parse_element(&self, text: &str) -> Option<Elem> {
        let text = text.trim();
        let inner = match text.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            Some(inner) => inner,
            None if self.factors.len() == 1 => text,
            None => return None,
        };
        let parts: Vec<&str> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner.split(',').map(str::trim).collect()
        };
        if parts.len() != self.factors.len() {
            return None;
        }
        let coords = parts
            .iter()
            .zip(self.factors.iter())
            .map(|(p, f)| f.position(p))
            .collect::<Option<Vec<_>>>()?;
        self.from_coords(&coords)
    }
}

impl From<AtomObj> for TensorObj {
    fn from(a: AtomObj) -> Self {
        TensorObj::from_factors(vec![a])
    }
}

impl PartialEq for TensorObj {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.factors == other.factors
    }
}

impl Eq for TensorObj {}

impl std::hash::Hash for TensorObj {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.factors.hash(state)
    }
}

impl fmt::Display for TensorObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("I");
        }
        let names: Vec<&str> = self.factors.iter().map(AtomObj::name).collect();
        f.write_str(&names.join("*"))
    }
}

impl fmt::Debug for TensorObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}[{}]", self.size)
    }
}

/// Index of `(x, y)` in `X ⊗ Y`, given `|Y|`.
#[inline]
pub fn pair(x: Elem, y: Elem, right_size: usize) -> Elem {
    x * right_size + y
}

/// Inverse of [`pair`].
#[inline]
pub fn unpair(z: Elem, right_size: usize) -> (Elem, Elem) {
    (z / right_size, z % right_size)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x2() -> TensorObj {
        AtomObj::range("X", 2).into()
    }

    #[test]
    fn rejects_duplicate_labels() {
        assert!(AtomObj::new("X", ["a", "a"]).is_err());
        assert!(AtomObj::new("X", ["a b"]).is_err());
        assert!(AtomObj::new("X", Vec::<String>::new()).is_ok());
    }

    #[test]
    fn unit_has_one_element() {
        let i = TensorObj::unit();
        assert_eq!(i.size(), 1);
        assert_eq!(i.render(0), "()");
        assert_eq!(i.parse_element("()"), Some(0));
    }

    #[test]
    fn tensor_is_concatenation() {
        let x = x2();
        let y: TensorObj = AtomObj::range("Y", 3).into();
        let xy = x.tensor(&y);
        assert_eq!(xy.size(), 6);
        assert_eq!(xy.factors().len(), 2);
        assert_eq!(TensorObj::unit().tensor(&x), x);
        assert_eq!(x.tensor(&TensorObj::unit()), x);
        assert_eq!(xy.tensor(&x), x.tensor(&y.tensor(&x)));
        assert_eq!(xy.render(pair(1, 2, 3)), "(1,2)");
        assert_eq!(xy.parse_element("(1, 2)"), Some(5));
        assert_eq!(xy.coords(5), vec![1, 2]);
    }

    #[test]
    fn single_factor_parses_both_forms() {
        let x = x2();
        assert_eq!(x.parse_element("1"), Some(1));
        assert_eq!(x.parse_element("(1)"), Some(1));
        assert_eq!(x.parse_element("2"), None);
    }
}
