//! Redundant spline dictionaries on refined translation lattices.
//!
//! Refining the translation step to `2^-l` turns the bases of `V_j` and
//! `W_j` into redundant families `V_{j,l}` and `W_{j,l}` whose span is the
//! finer space `V_{j+l}`. Concatenating one scaling family with wavelet
//! families across scales gives the multiresolution-like dictionaries
//! `D_{j,l}`; `l = 0` reproduces the classical wavelet basis.

use crate::dyadic::Dyadic;
use crate::mra::{self, Atom, AtomKind, SpaceParams};
use crate::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Defining parameters of a dictionary: order, interval, scale `j`, and
/// translation refinement `l` (step `2^-l` between consecutive translates).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictionarySpec {
    pub order: u32,
    pub c: i64,
    pub d: i64,
    pub scale: u32,
    pub refine: u32,
}

impl DictionarySpec {
    pub fn new(order: u32, c: i64, d: i64, scale: u32, refine: u32) -> Result<Self> {
        SpaceParams::new(order, c, d, scale)?;
        Ok(DictionarySpec { order, c, d, scale, refine })
    }

    pub fn space_params(&self) -> SpaceParams {
        SpaceParams { order: self.order, c: self.c, d: self.d, scale: self.scale }
    }
}

/// Which family the atom list was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DictionaryFamily {
    /// `D_{j,l}`: scaling family at scale 0 plus wavelet families up to
    /// scale `j - l` (the basis when `l = 0`).
    MultiResolution,
    /// `W_{j,l}` alone.
    Wavelet,
    /// `V_{j,l}` alone.
    Scaling,
    /// Caller-assembled atom list.
    Custom,
}

/// Uniform closed sampling grid over `[c, d]` with step `2^-log2_step`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub c: i64,
    pub d: i64,
    pub log2_step: u32,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        (((self.d - self.c) as usize) << self.log2_step) + 1
    }

    pub fn points(&self) -> Vec<f64> {
        let step = f64::powi(2.0, -(self.log2_step as i32));
        (0..self.len())
            .map(|t| self.c as f64 + t as f64 * step)
            .collect()
    }
}

/// Scaling-function dictionary `V_{j,l}`: B-spline translates with
/// `k in (2^j c - m, 2^j d)` on the lattice `Z / 2^l`.
pub fn dict_scaling(params: &SpaceParams, refine: u32) -> Result<Vec<Atom>> {
    let phi = mra::bspline(params.order)?;
    let lo = ((params.c << params.scale) - params.order as i64) << refine;
    let hi = (params.d << params.scale) << refine;
    ((lo + 1)..hi)
        .map(|t| mra::restricted_atom(AtomKind::Scaling, &phi, params, Dyadic::new(t, refine)))
        .collect()
}

/// Wavelet dictionary `W_{j,l}`, `l >= 1`: every translate on `Z / 2^l`
/// whose support meets `(c, d)`, i.e. `k in (2^j c - w, 2^j d)`.
pub fn dict_wavelet(params: &SpaceParams, refine: u32) -> Result<Vec<Atom>> {
    if refine < 1 {
        return Err(Error::arg(
            "wavelet dictionaries need refine >= 1; use the trimmed basis for refine = 0",
        ));
    }
    let (psi, _) = mra::chui_wang_wavelet(params.order)?;
    let w = params.wavelet_support() as i64;
    let lo = ((params.c << params.scale) - w) << refine;
    let hi = (params.d << params.scale) << refine;
    ((lo + 1)..hi)
        .map(|t| mra::restricted_atom(AtomKind::Wavelet, &psi, params, Dyadic::new(t, refine)))
        .collect()
}

/// An ordered atom family with its sampled matrix and (lazily) its exact
/// Gram matrix. Atoms are ordered coarse to fine, then by translation.
#[derive(Debug)]
pub struct Dictionary {
    pub spec: DictionarySpec,
    pub family: DictionaryFamily,
    /// Knot-grid exponent of the space the atoms live in (their breakpoints
    /// lie on the `2^-space_scale` lattice).
    pub space_scale: u32,
    pub atoms: Vec<Atom>,
    pub grid: GridSpec,
    matrix: DMatrix<f64>,
    gram: OnceLock<DMatrix<f64>>,
}

impl Dictionary {
    /// The multiresolution-like dictionary `D_{j,l}`. With `l = 0` this is
    /// the wavelet basis (scaling basis at scale 0, wavelet bases at scales
    /// `0..j`); with `l >= 1` the top `l` wavelet scales are omitted because
    /// the refined families already span them.
    pub fn multiresolution(spec: DictionarySpec, grid_exp: Option<u32>) -> Result<Self> {
        if spec.refine > spec.scale {
            return Err(Error::arg(format!(
                "refine {} exceeds dictionary scale {}",
                spec.refine, spec.scale
            )));
        }
        let base = spec.space_params().with_scale(0);
        let mut atoms = Vec::new();
        if spec.refine == 0 {
            atoms.extend(mra::basis_v(&base)?);
            for i in 0..spec.scale {
                atoms.extend(mra::basis_w(&base.with_scale(i))?);
            }
        } else {
            atoms.extend(dict_scaling(&base, spec.refine)?);
            for i in 0..=(spec.scale - spec.refine) {
                atoms.extend(dict_wavelet(&base.with_scale(i), spec.refine)?);
            }
        }
        Self::assemble(spec, DictionaryFamily::MultiResolution, spec.scale, atoms, grid_exp)
    }

    /// The wavelet family `W_{j,l}` as a dictionary for `V_{j+l}`.
    pub fn wavelet_family(
        params: &SpaceParams,
        refine: u32,
        grid_exp: Option<u32>,
    ) -> Result<Self> {
        let atoms = dict_wavelet(params, refine)?;
        let spec = DictionarySpec {
            order: params.order,
            c: params.c,
            d: params.d,
            scale: params.scale,
            refine,
        };
        Self::assemble(
            spec,
            DictionaryFamily::Wavelet,
            params.scale + refine,
            atoms,
            grid_exp,
        )
    }

    /// The scaling family `V_{j,l}` as a dictionary for `V_{j+l}`.
    pub fn scaling_family(
        params: &SpaceParams,
        refine: u32,
        grid_exp: Option<u32>,
    ) -> Result<Self> {
        let atoms = dict_scaling(params, refine)?;
        let spec = DictionarySpec {
            order: params.order,
            c: params.c,
            d: params.d,
            scale: params.scale,
            refine,
        };
        Self::assemble(
            spec,
            DictionaryFamily::Scaling,
            params.scale + refine,
            atoms,
            grid_exp,
        )
    }

    /// Wraps a caller-assembled atom list.
    pub fn from_atoms(
        spec: DictionarySpec,
        space_scale: u32,
        atoms: Vec<Atom>,
        grid_exp: Option<u32>,
    ) -> Result<Self> {
        Self::assemble(spec, DictionaryFamily::Custom, space_scale, atoms, grid_exp)
    }

    fn assemble(
        spec: DictionarySpec,
        family: DictionaryFamily,
        space_scale: u32,
        atoms: Vec<Atom>,
        grid_exp: Option<u32>,
    ) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::arg("dictionary has no atoms"));
        }
        let grid_exp = grid_exp.unwrap_or(space_scale + 1);
        let grid = GridSpec { c: spec.c, d: spec.d, log2_step: grid_exp };
        let matrix = sample_atoms(&atoms, &grid, space_scale)?;
        Ok(Dictionary {
            spec,
            family,
            space_scale,
            atoms,
            grid,
            matrix,
            gram: OnceLock::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// The sampled atom matrix on the dictionary's own grid, one
    /// unit-normalized column per atom.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Samples all atoms on a fresh grid with step `2^-r`, unit-normalizing
    /// each column in the discrete norm. `r` must exceed the knot-grid
    /// exponent so that sampling cannot alias distinct atoms together.
    pub fn sample(&self, r: u32) -> Result<DMatrix<f64>> {
        let grid = GridSpec { c: self.spec.c, d: self.spec.d, log2_step: r };
        sample_atoms(&self.atoms, &grid, self.space_scale)
    }

    /// Exact L2 Gram matrix of the unit-normalized atoms (cached).
    pub fn gram(&self) -> &DMatrix<f64> {
        self.gram.get_or_init(|| {
            let n = self.atoms.len();
            let mut g = DMatrix::zeros(n, n);
            for i in 0..n {
                g[(i, i)] = 1.0;
                let (lo_i, hi_i) = self.atoms[i].shape.support().expect("non-empty atom");
                for k in (i + 1)..n {
                    let (lo_k, hi_k) = self.atoms[k].shape.support().expect("non-empty atom");
                    if lo_i >= hi_k || lo_k >= hi_i {
                        continue;
                    }
                    let ip = self.atoms[i].shape.inner_product(&self.atoms[k].shape)
                        / (self.atoms[i].norm * self.atoms[k].norm);
                    g[(i, k)] = ip;
                    g[(k, i)] = ip;
                }
            }
            g
        })
    }

    /// Export-ready description of the dictionary.
    pub fn manifest(&self) -> DictionaryManifest {
        let mut groups: Vec<GroupCount> = Vec::new();
        for atom in &self.atoms {
            match groups
                .iter_mut()
                .find(|g| g.kind == atom.kind && g.scale == atom.scale)
            {
                Some(g) => g.count += 1,
                None => groups.push(GroupCount {
                    kind: atom.kind,
                    scale: atom.scale,
                    count: 1,
                }),
            }
        }
        DictionaryManifest {
            spec: self.spec,
            family: self.family,
            space_scale: self.space_scale,
            counts: ManifestCounts { total: self.atoms.len(), groups },
            atoms: self
                .atoms
                .iter()
                .map(|a| {
                    let (lo, hi) = a.shape.support().expect("non-empty atom");
                    ManifestAtom {
                        kind: a.kind,
                        scale: a.scale,
                        translation: a.translation.to_string(),
                        support: [lo.to_string(), hi.to_string()],
                    }
                })
                .collect(),
        }
    }
}

pub(crate) fn sample_atoms(
    atoms: &[Atom],
    grid: &GridSpec,
    space_scale: u32,
) -> Result<DMatrix<f64>> {
    if grid.log2_step < space_scale + 1 {
        return Err(Error::arg(format!(
            "grid exponent {} too coarse for knot grid 2^-{} (need at least {})",
            grid.log2_step,
            space_scale,
            space_scale + 1
        )));
    }
    let points = grid.points();
    let mut matrix = DMatrix::zeros(points.len(), atoms.len());
    for (col, atom) in atoms.iter().enumerate() {
        let mut norm_sq = 0.0;
        for (row, &x) in points.iter().enumerate() {
            let v = atom.shape.evaluate(x);
            matrix[(row, col)] = v;
            norm_sq += v * v;
        }
        debug_assert!(norm_sq > 0.0, "atom sampled to zero");
        let inv = 1.0 / norm_sq.sqrt();
        for row in 0..points.len() {
            matrix[(row, col)] *= inv;
        }
    }
    Ok(matrix)
}

/// JSON-exportable dictionary description.
#[derive(Debug, Serialize, Deserialize)]
pub struct DictionaryManifest {
    pub spec: DictionarySpec,
    pub family: DictionaryFamily,
    pub space_scale: u32,
    pub counts: ManifestCounts,
    pub atoms: Vec<ManifestAtom>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestCounts {
    pub total: usize,
    pub groups: Vec<GroupCount>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct GroupCount {
    pub kind: AtomKind,
    pub scale: u32,
    pub count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ManifestAtom {
    pub kind: AtomKind,
    pub scale: u32,
    pub translation: String,
    pub support: [String; 2],
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(order: u32, c: i64, d: i64, scale: u32) -> SpaceParams {
        SpaceParams::new(order, c, d, scale).unwrap()
    }

    #[test]
    fn scaling_dictionary_counts() {
        let atoms = dict_scaling(&params(4, 0, 8, 0), 2).unwrap();
        assert_eq!(atoms.len(), 47); // (8 + 4) * 4 - 1
    }

    #[test]
    fn scaling_dictionary_at_refine_zero_matches_basis() {
        let p = params(4, 0, 8, 1);
        let dict = dict_scaling(&p, 0).unwrap();
        let basis = mra::basis_v(&p).unwrap();
        assert_eq!(dict.len(), basis.len());
        for (a, b) in dict.iter().zip(&basis) {
            assert_eq!(a.translation, b.translation);
            assert_eq!(a.shape, b.shape);
        }
    }

    #[test]
    fn wavelet_dictionary_counts() {
        assert_eq!(dict_wavelet(&params(4, 0, 8, 0), 2).unwrap().len(), 59); // (8+7)*4 - 1
        assert_eq!(dict_wavelet(&params(2, 0, 2, 0), 1).unwrap().len(), 9); // (2+3)*2 - 1
    }

    #[test]
    fn wavelet_dictionary_requires_refinement() {
        assert!(dict_wavelet(&params(4, 0, 8, 0), 0).is_err());
    }

    #[test]
    fn wavelet_atoms_live_on_fine_knot_grid() {
        let atoms = dict_wavelet(&params(4, 0, 8, 1), 2).unwrap();
        for atom in &atoms {
            assert!(atom.shape.degree() <= 3);
            for b in atom.shape.breakpoints() {
                assert!(b.log2_den() <= 3, "breakpoint {b} off the 2^-3 lattice");
            }
        }
    }

    #[test]
    fn multiresolution_dictionary_counts() {
        let basis =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 6, 0).unwrap(), Some(7))
                .unwrap();
        assert_eq!(basis.len(), 515);
        let dict =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 6, 2).unwrap(), Some(7))
                .unwrap();
        assert_eq!(dict.len(), 1174); // 47 + 59 + 91 + 155 + 283 + 539
    }

    #[test]
    fn refine_above_scale_is_rejected() {
        let spec = DictionarySpec::new(4, 0, 8, 1, 2).unwrap();
        assert!(Dictionary::multiresolution(spec, None).is_err());
    }

    #[test]
    fn minimum_inner_wavelet_support_scales_with_refinement() {
        // The finest wavelet scale in D_{j,l} is j - l, so the smallest inner
        // wavelet support is 2^(l-1) times the one in the basis D_{j,0}.
        let inner_min = |dict: &Dictionary| -> f64 {
            dict.atoms
                .iter()
                .filter(|a| a.kind == AtomKind::Wavelet)
                .filter(|a| {
                    let (lo, hi) = a.shape.support().unwrap();
                    let w = Dyadic::from_int(2 * a.order as i64 - 1);
                    hi - lo == w.mul_pow2(-(a.scale as i32))
                })
                .map(|a| {
                    let (lo, hi) = a.shape.support().unwrap();
                    (hi - lo).to_f64()
                })
                .fold(f64::INFINITY, f64::min)
        };
        let basis =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 4, 0).unwrap(), None)
                .unwrap();
        let dict =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 4, 2).unwrap(), None)
                .unwrap();
        assert_eq!(inner_min(&dict), 2.0 * inner_min(&basis));
    }

    #[test]
    fn gram_basics() {
        let p = params(2, 0, 4, 0);
        let dict = Dictionary::wavelet_family(&p, 1, None).unwrap();
        let g = dict.gram();
        assert_eq!(g.nrows(), dict.len());
        for i in 0..g.nrows() {
            assert_eq!(g[(i, i)], 1.0);
            for k in 0..g.ncols() {
                assert!((g[(i, k)] - g[(k, i)]).abs() < 1e-15);
                assert!(g[(i, k)].abs() <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn gram_of_duplicated_atom_has_unit_off_diagonal() {
        let p = params(2, 0, 4, 0);
        let atom = mra::scaling_atom(&p, Dyadic::from_int(1)).unwrap();
        let spec = DictionarySpec::new(2, 0, 4, 0, 0).unwrap();
        let dict = Dictionary::from_atoms(spec, 0, vec![atom.clone(), atom], None).unwrap();
        let g = dict.gram();
        assert!((g[(0, 1)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_supports_give_zero_gram_entries() {
        let p = params(2, 0, 8, 1);
        let a = mra::scaling_atom(&p, Dyadic::from_int(0)).unwrap();
        let b = mra::scaling_atom(&p, Dyadic::from_int(10)).unwrap();
        let spec = DictionarySpec::new(2, 0, 8, 1, 0).unwrap();
        let dict = Dictionary::from_atoms(spec, 1, vec![a, b], None).unwrap();
        assert_eq!(dict.gram()[(0, 1)], 0.0);
    }

    #[test]
    fn sampling_grid_and_normalization() {
        let dict =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 2, 1).unwrap(), Some(7))
                .unwrap();
        let m = dict.matrix();
        assert_eq!(m.nrows(), 1025); // 8 * 2^7 + 1
        for col in 0..m.ncols() {
            let norm: f64 = m.column(col).norm();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(dict.sample(2).is_err()); // coarser than the knot grid
    }

    #[test]
    fn samples_vanish_outside_support() {
        let p = params(4, 0, 8, 0);
        let atom = mra::scaling_atom(&p, Dyadic::from_int(2)).unwrap(); // support [2, 6]
        let spec = DictionarySpec::new(4, 0, 8, 0, 0).unwrap();
        let dict = Dictionary::from_atoms(spec, 0, vec![atom], Some(3)).unwrap();
        let m = dict.matrix();
        for (row, &x) in dict.grid.points().iter().enumerate() {
            if !(2.0..6.0).contains(&x) {
                assert_eq!(m[(row, 0)], 0.0, "x={x}");
            }
        }
    }

    #[test]
    fn atom_ordering_is_coarse_to_fine_then_by_translation() {
        let dict =
            Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 3, 1).unwrap(), None)
                .unwrap();
        let mut seen_wavelet = false;
        let mut last: Option<(u32, Dyadic)> = None;
        for atom in &dict.atoms {
            match atom.kind {
                AtomKind::Scaling => assert!(!seen_wavelet, "scaling after wavelet block"),
                AtomKind::Wavelet => {
                    if !seen_wavelet {
                        seen_wavelet = true;
                        last = None;
                    }
                    if let Some((scale, k)) = last {
                        assert!(
                            atom.scale > scale || (atom.scale == scale && atom.translation > k)
                        );
                    }
                    last = Some((atom.scale, atom.translation));
                }
            }
        }
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dict =
            Dictionary::multiresolution(DictionarySpec::new(2, 0, 4, 1, 1).unwrap(), None)
                .unwrap();
        let manifest = dict.manifest();
        assert_eq!(manifest.counts.total, dict.len());
        let total: usize = manifest.counts.groups.iter().map(|g| g.count).sum();
        assert_eq!(total, dict.len());
        let json = serde_json::to_string(&manifest).unwrap();
        let back: DictionaryManifest = serde_json::from_str(&json).unwrap();
        assert_eq!(back.counts.total, dict.len());
        assert!(back.atoms[0].translation.contains("/2^"));
    }
}
