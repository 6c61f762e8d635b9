//! Tabulated morphisms between finite objects.

use std::fmt;

use crate::error::{Error, Result};
use crate::object::{pair, unpair, Elem, TensorObj};

/// Largest number of maps [`enumerate_maps`] will produce.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// A total function `dom → cod`, stored as a lookup table over element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinMap {
    dom: TensorObj,
    cod: TensorObj,
    table: Vec<Elem>,
}

impl FinMap {
    pub fn new(dom: TensorObj, cod: TensorObj, table: Vec<Elem>) -> Result<Self> {
        if table.len() != dom.size() {
            return Err(Error::InvalidTable(format!(
                "table for {dom} -> {cod} has {} entries, expected {}",
                table.len(),
                dom.size()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.size()) {
            return Err(Error::InvalidTable(format!(
                "value index {bad} out of range for {cod}"
            )));
        }
        Ok(FinMap { dom, cod, table })
    }

    /// Tabulates `f`. Panics if `f` leaves `cod`.
    pub fn from_fn(dom: TensorObj, cod: TensorObj, f: impl FnMut(Elem) -> Elem) -> Self {
        let table: Vec<Elem> = dom.elements().map(f).collect();
        assert!(
            table.iter().all(|&y| y < cod.size()),
            "from_fn: value outside {cod}"
        );
        FinMap { dom, cod, table }
    }

    pub fn identity(obj: &TensorObj) -> Self {
        FinMap::from_fn(obj.clone(), obj.clone(), |x| x)
    }

    pub fn constant(dom: &TensorObj, cod: &TensorObj, value: Elem) -> Self {
        FinMap::from_fn(dom.clone(), cod.clone(), |_| value)
    }

    pub fn dom(&self) -> &TensorObj {
        &self.dom
    }

    pub fn cod(&self) -> &TensorObj {
        &self.cod
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x]
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &FinMap) -> Result<FinMap> {
        compose(self, f)
    }

    /// Position of this map in the [`enumerate_maps`] order.
    pub fn rank(&self) -> u128 {
        let base = self.cod.size() as u128;
        self.table
            .iter()
            .fold(0u128, |acc, &y| acc * base + y as u128)
    }

    /// Inverse of [`rank`](Self::rank).
    pub fn from_rank(dom: &TensorObj, cod: &TensorObj, mut rank: u128) -> FinMap {
        let base = cod.size() as u128;
        let mut table = vec![0; dom.size()];
        for slot in table.iter_mut().rev() {
            *slot = (rank % base) as Elem;
            rank /= base;
        }
        FinMap {
            dom: dom.clone(),
            cod: cod.clone(),
            table,
        }
    }

    /// `x -> y` lines, one per domain element.
    pub fn render_table(&self) -> Vec<String> {
        self.dom
            .elements()
            .map(|x| {
                format!(
                    "{} -> {}",
                    self.dom.render(x),
                    self.cod.render(self.apply(x))
                )
            })
            .collect()
    }
}

impl fmt::Debug for FinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FinMap({} -> {}: {})",
            self.dom,
            self.cod,
            self.render_table().join(", ")
        )
    }
}

/// `g ∘ f`.
pub fn compose(g: &FinMap, f: &FinMap) -> Result<FinMap> {
    if f.cod != g.dom {
        return Err(Error::boundary(
            format!(
                "cannot compose {} -> {} after {} -> {}",
                g.dom, g.cod, f.dom, f.cod
            ),
            &g.dom,
            &f.cod,
        ));
    }
    Ok(FinMap {
        dom: f.dom.clone(),
        cod: g.cod.clone(),
        table: f.table.iter().map(|&y| g.table[y]).collect(),
    })
}

/// `f ⊗ g`, acting blockwise on tuples.
pub fn tensor_map(f: &FinMap, g: &FinMap) -> FinMap {
    let (gd, gc) = (g.dom.size(), g.cod.size());
    let dom = f.dom.tensor(&g.dom);
    let cod = f.cod.tensor(&g.cod);
    let table = dom
        .elements()
        .map(|z| {
            let (x, y) = unpair(z, gd);
            pair(f.apply(x), g.apply(y), gc)
        })
        .collect();
    FinMap { dom, cod, table }
}

/// `id_W ⊗ f` without materialising the identity.
pub fn whisker_left(w: &TensorObj, f: &FinMap) -> FinMap {
    let (fd, fc) = (f.dom.size(), f.cod.size());
    let dom = w.tensor(&f.dom);
    let cod = w.tensor(&f.cod);
    let table = dom
        .elements()
        .map(|z| {
            let (x, y) = unpair(z, fd);
            pair(x, f.apply(y), fc)
        })
        .collect();
    FinMap { dom, cod, table }
}

/// `f ⊗ id_W`.
pub fn whisker_right(f: &FinMap, w: &TensorObj) -> FinMap {
    let ws = w.size();
    let dom = f.dom.tensor(w);
    let cod = f.cod.tensor(w);
    let table = dom
        .elements()
        .map(|z| {
            let (x, y) = unpair(z, ws);
            pair(f.apply(x), y, ws)
        })
        .collect();
    FinMap { dom, cod, table }
}

/// The twist `σ_{X,Y} : X⊗Y → Y⊗X`.
pub fn symmetry(x: &TensorObj, y: &TensorObj) -> FinMap {
    let (xs, ys) = (x.size(), y.size());
    FinMap::from_fn(x.tensor(y), y.tensor(x), |z| {
        let (a, b) = unpair(z, ys);
        pair(b, a, xs)
    })
}

/// Comultiplication of the canonical comonoid, `x ↦ (x, x)`.
pub fn diagonal(x: &TensorObj) -> FinMap {
    let n = x.size();
    FinMap::from_fn(x.clone(), x.tensor(x), |a| pair(a, a, n))
}

/// Counit of the canonical comonoid, `x ↦ ()`.
pub fn discard(x: &TensorObj) -> FinMap {
    FinMap::constant(x, &TensorObj::unit(), 0)
}

/// Number of maps `dom → cod`, `|cod|^|dom|`, or `None` on overflow.
pub fn count_maps(dom: &TensorObj, cod: &TensorObj) -> Option<u128> {
    let exp = u32::try_from(dom.size()).ok()?;
    (cod.size() as u128).checked_pow(exp)
}

/// All maps `dom → cod` in rank order, refusing more than
/// [`DEFAULT_ENUMERATION_CAP`].
pub fn enumerate_maps(dom: &TensorObj, cod: &TensorObj) -> Result<MapIter> {
    enumerate_maps_capped(dom, cod, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_maps_capped(dom: &TensorObj, cod: &TensorObj, cap: u128) -> Result<MapIter> {
    let count = count_maps(dom, cod).unwrap_or(u128::MAX);
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    Ok(MapIter {
        dom: dom.clone(),
        cod: cod.clone(),
        next: 0,
        count,
    })
}

/// Iterator returned by [`enumerate_maps`].
pub struct MapIter {
    dom: TensorObj,
    cod: TensorObj,
    next: u128,
    count: u128,
}

impl Iterator for MapIter {
    type Item = FinMap;

    fn next(&mut self) -> Option<FinMap> {
        if self.next >= self.count {
            return None;
        }
        let m = FinMap::from_rank(&self.dom, &self.cod, self.next);
        self.next += 1;
        Some(m)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.count - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MapIter {}
