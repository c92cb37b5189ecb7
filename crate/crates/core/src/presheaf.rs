//! Presheaves of formal spectra on a finite poset, their sectionwise
//! completion, and the product extension to finite coproducts of elements.
//!
//! Text format, one statement per line (`#` starts a comment):
//!
//! ```text
//! elements u v w
//! leq u v
//! section v = 0: Z/4; 1: Prufer(2)
//! restrict v u 0: 0->0*1, 1->1*1; 1: 0->0*1
//! ```
//!
//! `leq` edges are closed reflexively and transitively. `restrict v u` gives
//! the map `F(v) -> F(u)` for `u <= v` degree by degree as canonical-map
//! entries `i->j*k` between atom positions; undeclared maps are zero.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianError, GradedTame, HomEntry, Prime, TameGroup, TameHom};
use crate::text::{Cursor, ParseError};
use crate::tstructure::{pi_p, FormalSpectrum};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("relation is not antisymmetric: {0} <= {1} <= {0}")]
    NotAntisymmetric(String, String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("duplicate element {0}")]
    DuplicateElement(String),
    #[error("restriction {from} -> {to} declared but {to} <= {from} does not hold")]
    NotBelow { from: String, to: String },
    #[error("restriction {from} -> {to} in degree {degree}: {why}")]
    BadRestriction {
        from: String,
        to: String,
        degree: i64,
        why: String,
    },
    #[error("not functorial: {0}")]
    NotFunctorial(String),
    #[error("subset is not down-closed: {0} is missing")]
    NotDownClosed(String),
    #[error("section {0} is not concentrated in degree 0")]
    NotHeartValued(String),
    #[error("extension in section {element}, degree {degree} is not determined: 0 -> {left} -> ? -> {right} -> 0")]
    UnresolvedExtension {
        element: String,
        degree: i64,
        left: TameGroup,
        right: TameGroup,
    },
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinitePoset {
    elements: Vec<String>,
    /// `leq[a][b]` iff `a <= b`.
    leq: Vec<Vec<bool>>,
}

impl FinitePoset {
    /// Closes `edges` reflexively and transitively and checks antisymmetry.
    pub fn new(elements: Vec<String>, edges: &[(usize, usize)]) -> Result<Self, PresheafError> {
        let n = elements.len();
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e) {
                return Err(PresheafError::DuplicateElement(e.clone()));
            }
        }
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in edges {
            leq[a][b] = true;
        }
        for k in 0..n {
            let via = leq[k].clone();
            for row in leq.iter_mut().filter(|row| row[k]) {
                for (x, &y) in row.iter_mut().zip(&via) {
                    *x |= y;
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(PresheafError::NotAntisymmetric(
                        elements[i].clone(),
                        elements[j].clone(),
                    ));
                }
            }
        }
        Ok(FinitePoset { elements, leq })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn name(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a][b]
    }

    /// Pairs `(v, u)` with `u < v`.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |v| (0..n).filter(move |&u| u != v && self.leq(u, v)).map(move |u| (v, u)))
    }

    pub fn is_down_closed(&self, subset: &BTreeSet<usize>) -> bool {
        subset
            .iter()
            .all(|&v| (0..self.len()).all(|u| !self.leq(u, v) || subset.contains(&u)))
    }

    /// Every down-closed subset, as sorted index sets.
    pub fn down_closed_subsets(&self) -> Vec<BTreeSet<usize>> {
        (0u32..1 << self.len())
            .map(|mask| (0..self.len()).filter(|i| mask >> i & 1 == 1).collect())
            .filter(|s| self.is_down_closed(s))
            .collect()
    }

    /// Covering relations `(a, b)` with `a < b` and nothing in between.
    fn cover_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq(a, b) && !(0..n).any(|c| c != a && c != b && self.leq(a, c) && self.leq(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Degreewise restriction maps.
pub type GradedHom = BTreeMap<i64, TameHom>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralPresheaf {
    poset: FinitePoset,
    sections: Vec<FormalSpectrum>,
    /// `(v, u) -> F(v) -> F(u)` for `u < v`, only nonzero degrees stored.
    restrictions: BTreeMap<(usize, usize), GradedHom>,
}

fn is_zero_graded(h: &GradedHom) -> bool {
    h.values().all(TameHom::is_zero)
}

impl SpectralPresheaf {
    /// Validates ranges, ends of every map, and functoriality.
    pub fn new(
        poset: FinitePoset,
        sections: Vec<FormalSpectrum>,
        restrictions: BTreeMap<(usize, usize), GradedHom>,
    ) -> Result<Self, PresheafError> {
        assert_eq!(poset.len(), sections.len(), "one section per element");
        let mut stored = BTreeMap::new();
        for ((v, u), h) in restrictions {
            let (from, to) = (poset.name(v).to_string(), poset.name(u).to_string());
            if u == v || !poset.leq(u, v) {
                return Err(PresheafError::NotBelow { from, to });
            }
            let mut graded = GradedHom::new();
            for (n, m) in h {
                if *m.source() != sections[v].pi(n) || *m.target() != sections[u].pi(n) {
                    return Err(PresheafError::BadRestriction {
                        from,
                        to,
                        degree: n,
                        why: format!("map {} -> {} does not match the sections", m.source(), m.target()),
                    });
                }
                if !m.is_zero() {
                    graded.insert(n, m);
                }
            }
            if !graded.is_empty() {
                stored.insert((v, u), graded);
            }
        }
        let f = SpectralPresheaf {
            poset,
            sections,
            restrictions: stored,
        };
        f.check_functorial()?;
        Ok(f)
    }

    pub fn poset(&self) -> &FinitePoset {
        &self.poset
    }

    pub fn section(&self, v: usize) -> &FormalSpectrum {
        &self.sections[v]
    }

    pub fn sections(&self) -> &[FormalSpectrum] {
        &self.sections
    }

    /// `F(v) -> F(u)` in degree `n`; identity when `u = v`.
    pub fn restriction(&self, v: usize, u: usize, n: i64) -> TameHom {
        let (src, tgt) = (self.sections[v].pi(n), self.sections[u].pi(n));
        if u == v {
            return TameHom::identity(&src);
        }
        self.restrictions
            .get(&(v, u))
            .and_then(|h| h.get(&n))
            .cloned()
            .unwrap_or_else(|| TameHom::zero(&src, &tgt))
    }

    fn degrees(&self) -> BTreeSet<i64> {
        self.sections
            .iter()
            .flat_map(|s| s.homotopy.iter().map(|(n, _)| n))
            .collect()
    }

    /// `res(w -> u) = res(v -> u) . res(w -> v)` for all `u <= v <= w`.
    pub fn check_functorial(&self) -> Result<(), PresheafError> {
        let n = self.poset.len();
        for w in 0..n {
            for v in (0..n).filter(|&v| v != w && self.poset.leq(v, w)) {
                for u in (0..n).filter(|&u| u != v && self.poset.leq(u, v)) {
                    for d in self.degrees() {
                        let composite = self.restriction(w, v, d).then(&self.restriction(v, u, d))?;
                        if composite != self.restriction(w, u, d) {
                            return Err(PresheafError::NotFunctorial(format!(
                                "{} -> {} -> {} in degree {d}",
                                self.poset.name(w),
                                self.poset.name(v),
                                self.poset.name(u)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The presheaf on a down-closed subset, with elements kept in order.
    pub fn restrict_to(&self, subset: &BTreeSet<usize>) -> Result<SpectralPresheaf, PresheafError> {
        if let Some(missing) = subset
            .iter()
            .flat_map(|&v| (0..self.poset.len()).filter(move |&u| self.poset.leq(u, v)))
            .find(|u| !subset.contains(u))
        {
            return Err(PresheafError::NotDownClosed(self.poset.name(missing).to_string()));
        }
        let keep: Vec<usize> = subset.iter().copied().collect();
        let new_index = |i: usize| keep.iter().position(|&k| k == i).expect("kept");
        let elements = keep.iter().map(|&i| self.poset.name(i).to_string()).collect();
        let edges: Vec<(usize, usize)> = self
            .poset
            .strict_pairs()
            .filter(|(v, u)| subset.contains(v) && subset.contains(u))
            .map(|(v, u)| (new_index(u), new_index(v)))
            .collect();
        let poset = FinitePoset::new(elements, &edges)?;
        let sections = keep.iter().map(|&i| self.sections[i].clone()).collect();
        let restrictions = self
            .restrictions
            .iter()
            .filter(|((v, u), _)| subset.contains(v) && subset.contains(u))
            .map(|((v, u), h)| ((new_index(*v), new_index(*u)), h.clone()))
            .collect();
        SpectralPresheaf::new(poset, sections, restrictions)
    }
}

/// Completion of one formal spectrum: `pi_n^p` in every degree.
pub fn complete_spectrum(
    e: &FormalSpectrum,
    p: Prime,
) -> Result<Result<FormalSpectrum, (i64, TameGroup, TameGroup)>, AbelianError> {
    let mut out = GradedTame::new();
    let Some((lo, hi)) = e.homotopy.support() else {
        return Ok(Ok(FormalSpectrum::default()));
    };
    for n in lo..=hi + 1 {
        let r = pi_p(e, p, n)?;
        match r.middle_known {
            Some(m) => out.set(n, m),
            None => return Ok(Err((n, r.left, r.right))),
        }
    }
    Ok(Ok(FormalSpectrum::new(out)))
}

/// The map on `pi_n^p = L_0 pi_n (+) L_1 pi_{n-1}` induced by `h`.
fn complete_hom(h: &dyn Fn(i64) -> TameHom, n: i64, p: Prime) -> Result<TameHom, AbelianError> {
    h(n).derived(p, 0)?.direct_sum(&h(n - 1).derived(p, 1)?)
}

pub fn complete_sectionwise(f: &SpectralPresheaf, p: Prime) -> Result<SpectralPresheaf, PresheafError> {
    let sections = f
        .sections
        .iter()
        .enumerate()
        .map(|(v, e)| {
            complete_spectrum(e, p)?.map_err(|(degree, left, right)| PresheafError::UnresolvedExtension {
                element: f.poset.name(v).to_string(),
                degree,
                left,
                right,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut restrictions = BTreeMap::new();
    let degrees: BTreeSet<i64> = sections
        .iter()
        .flat_map(|s| s.homotopy.iter().map(|(n, _)| n))
        .collect();
    for (v, u) in f.poset.strict_pairs() {
        let mut graded = GradedHom::new();
        for &n in &degrees {
            graded.insert(n, complete_hom(&|d| f.restriction(v, u, d), n, p)?);
        }
        if !is_zero_graded(&graded) {
            restrictions.insert((v, u), graded);
        }
    }
    SpectralPresheaf::new(f.poset.clone(), sections, restrictions)
}

/// Applies `L_i` to every section of a degree-0 presheaf, transports the
/// restrictions, and checks the result is again a functorial presheaf whose
/// sections are `L_i` of the original sections.
pub fn li_sectionwise_check(f: &SpectralPresheaf, p: Prime, i: u8) -> Result<bool, PresheafError> {
    for (v, s) in f.sections.iter().enumerate() {
        if s.homotopy.iter().any(|(n, _)| n != 0) {
            return Err(PresheafError::NotHeartValued(f.poset.name(v).to_string()));
        }
    }
    let li = |g: &TameGroup| -> Result<TameGroup, AbelianError> {
        let dc = g.derived_completion(p)?;
        Ok(if i == 0 { dc.l0 } else { dc.l1 })
    };
    let sections = f
        .sections
        .iter()
        .map(|s| Ok(FormalSpectrum::concentrated(li(&s.pi(0))?, 0)))
        .collect::<Result<Vec<_>, AbelianError>>()?;
    let mut restrictions = BTreeMap::new();
    for (v, u) in f.poset.strict_pairs() {
        let h = f.restriction(v, u, 0).derived(p, i)?;
        restrictions.insert((v, u), [(0, h)].into_iter().collect());
    }
    match SpectralPresheaf::new(f.poset.clone(), sections, restrictions) {
        Ok(_) => Ok(true),
        Err(PresheafError::NotFunctorial(_) | PresheafError::BadRestriction { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Multisets of element indices of size at most `k`, ascending.
fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for m in &frontier {
            let start = m.last().copied().unwrap_or(0);
            for i in start..n {
                let mut w = m.clone();
                w.push(i);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Extends `f` to coproducts `U_1 + ... + U_k` of at most three elements by
/// `F(U_1 + ... + U_k) = F(U_1) x ... x F(U_k)` and checks that the
/// completed presheaf is again product preserving, on sections and on the
/// restrictions between coproducts with matching components.
pub fn product_preservation_check(f: &SpectralPresheaf, p: Prime) -> Result<bool, PresheafError> {
    let completed = complete_sectionwise(f, p)?;
    let value = |g: &SpectralPresheaf, m: &[usize]| -> GradedTame {
        m.iter()
            .fold(GradedTame::new(), |acc, &i| acc.direct_sum(&g.section(i).homotopy))
    };
    let map = |g: &SpectralPresheaf, vs: &[usize], us: &[usize], n: i64| -> Result<TameHom, AbelianError> {
        vs.iter().zip(us).try_fold(
            TameHom::zero(&TameGroup::zero(), &TameGroup::zero()),
            |acc, (&v, &u)| acc.direct_sum(&g.restriction(v, u, n)),
        )
    };
    let n = f.poset.len();
    for vs in multisets(n, 3) {
        let product = FormalSpectrum::new(value(f, &vs));
        let completed_product = match complete_spectrum(&product, p)? {
            Ok(c) => c,
            Err((degree, left, right)) => {
                return Err(PresheafError::UnresolvedExtension {
                    element: format!("{vs:?}"),
                    degree,
                    left,
                    right,
                })
            }
        };
        if completed_product.homotopy != value(&completed, &vs) {
            return Ok(false);
        }
        // restrictions componentwise along u_i <= v_i
        let choices: Vec<Vec<usize>> = vs
            .iter()
            .map(|&v| (0..n).filter(|&u| f.poset.leq(u, v)).collect())
            .collect();
        let mut us_all = vec![Vec::new()];
        for c in &choices {
            us_all = us_all
                .into_iter()
                .flat_map(|prefix: Vec<usize>| {
                    c.iter().map(move |&u| {
                        let mut w = prefix.clone();
                        w.push(u);
                        w
                    })
                })
                .collect();
        }
        let degrees: BTreeSet<i64> = completed_product.homotopy.iter().map(|(d, _)| d).collect();
        for us in us_all {
            for &d in &degrees {
                let of_product = complete_hom(&|k| map(f, &vs, &us, k).expect("sum of maps"), d, p)?;
                let product_of = map(&completed, &vs, &us, d)?;
                if of_product != product_of {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn parse_hom_entries(c: &mut Cursor<'_>) -> Result<Vec<HomEntry>, ParseError> {
    let first = c.count()? as usize;
    if !c.eat("->") {
        if first == 0 {
            return Ok(Vec::new());
        }
        return Err(c.error("'->'"));
    }
    let mut entries = vec![entry_tail(c, first)?];
    while c.eat(",") {
        entries.push(entry(c)?);
    }
    Ok(entries)
}

fn entry(c: &mut Cursor<'_>) -> Result<HomEntry, ParseError> {
    let s = c.count()? as usize;
    c.expect("->")?;
    entry_tail(c, s)
}

fn entry_tail(c: &mut Cursor<'_>, source: usize) -> Result<HomEntry, ParseError> {
    let target = c.count()? as usize;
    let scale = if c.eat("*") { c.integer()? } else { 1 };
    Ok(HomEntry { source, target, scale })
}

impl FromStr for SpectralPresheaf {
    type Err = PresheafError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut names: Option<Vec<String>> = None;
        let mut edges = Vec::new();
        let mut sections: BTreeMap<usize, FormalSpectrum> = BTreeMap::new();
        let mut maps: Vec<(usize, usize, i64, Vec<HomEntry>)> = Vec::new();
        let mut offset = 0;
        for line in s.split_inclusive('\n') {
            let start = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("");
            let mut c = Cursor::with_offset(body, start);
            if c.at_end() {
                continue;
            }
            if c.eat_keyword("elements") {
                let mut list = Vec::new();
                while !c.at_end() {
                    list.push(c.identifier()?.to_string());
                }
                names = Some(list);
                continue;
            }
            let Some(list) = names.as_ref() else {
                return Err(c.error("'elements' line first").into());
            };
            let lookup = |c: &mut Cursor<'_>| -> Result<usize, PresheafError> {
                let id = c.identifier()?;
                list.iter()
                    .position(|e| e == id)
                    .ok_or_else(|| PresheafError::UnknownElement(id.to_string()))
            };
            if c.eat_keyword("leq") {
                let a = lookup(&mut c)?;
                let b = lookup(&mut c)?;
                c.finish()?;
                edges.push((a, b));
            } else if c.eat_keyword("section") {
                let v = lookup(&mut c)?;
                c.expect("=")?;
                let at = c.position() - start;
                let g: GradedTame = body[at..].parse().map_err(|e: ParseError| ParseError {
                    position: e.position + start + at,
                    ..e
                })?;
                sections.insert(v, FormalSpectrum::new(g));
            } else if c.eat_keyword("restrict") {
                let v = lookup(&mut c)?;
                let u = lookup(&mut c)?;
                loop {
                    let n = c.integer()?;
                    c.expect(":")?;
                    let entries = parse_hom_entries(&mut c)?;
                    maps.push((v, u, n, entries));
                    if !c.eat(";") || c.at_end() {
                        break;
                    }
                }
                c.finish()?;
            } else {
                return Err(c.error("'leq', 'section' or 'restrict'").into());
            }
        }
        let names = names.ok_or_else(|| ParseError {
            position: 0,
            expected: "'elements' line".into(),
            found: "end of input".into(),
        })?;
        let poset = FinitePoset::new(names, &edges)?;
        let sections: Vec<FormalSpectrum> = (0..poset.len())
            .map(|i| sections.remove(&i).unwrap_or_default())
            .collect();
        let mut restrictions: BTreeMap<(usize, usize), GradedHom> = BTreeMap::new();
        for (v, u, n, entries) in maps {
            let (from, to) = (poset.name(v).to_string(), poset.name(u).to_string());
            if u == v || !poset.leq(u, v) {
                return Err(PresheafError::NotBelow { from, to });
            }
            let h = TameHom::new(sections[v].pi(n), sections[u].pi(n), entries).map_err(|e| {
                PresheafError::BadRestriction {
                    from,
                    to,
                    degree: n,
                    why: e.to_string(),
                }
            })?;
            restrictions.entry((v, u)).or_default().insert(n, h);
        }
        SpectralPresheaf::new(poset, sections, restrictions)
    }
}

/// Writes the text format; `leq` lines list covering relations only.
impl fmt::Display for SpectralPresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "elements {}", self.poset.elements.join(" "))?;
        for (a, b) in self.poset.cover_edges() {
            writeln!(f, "leq {} {}", self.poset.name(a), self.poset.name(b))?;
        }
        for (v, s) in self.sections.iter().enumerate() {
            writeln!(f, "section {} = {}", self.poset.name(v), s)?;
        }
        for ((v, u), h) in &self.restrictions {
            let parts: Vec<String> = h.iter().map(|(n, m)| format!("{n}: {m}")).collect();
            writeln!(
                f,
                "restrict {} {} {}",
                self.poset.name(*v),
                self.poset.name(*u),
                parts.join("; ")
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests;
