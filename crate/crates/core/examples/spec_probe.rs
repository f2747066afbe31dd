use splinedict::dictionary::{Dictionary, DictionarySpec, GridSpec};
use splinedict::mra::{self, SpaceParams};

fn main() {
    let d62 = Dictionary::multiresolution(DictionarySpec::new(4, 0, 8, 6, 2).unwrap(), Some(7)).unwrap();
    let md = d62.matrix();
    let svdt = md.transpose().svd(false, false);
    let mut sv: Vec<f64> = svdt.singular_values.iter().cloned().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let s0 = sv[0];
    for cut in [1e-8, 1e-10, 1e-12, 2.3e-13, 1e-13, 1e-14] {
        println!("D62 rank@{cut:.1e} = {}", sv.iter().filter(|&&s| s > cut * s0).count());
    }
    // Projection of the fine B-spline basis onto the D62 numerical span.
    let fine_params = SpaceParams::new(4, 0, 8, 6).unwrap();
    let fine_atoms = mra::basis_v(&fine_params).unwrap();
    let grid = GridSpec { c: 0, d: 8, log2_step: 7 };
    let fine_dict = Dictionary::from_atoms(DictionarySpec::new(4, 0, 8, 6, 0).unwrap(), 6, fine_atoms, Some(7)).unwrap();
    let fine = fine_dict.matrix().clone();
    let _ = grid;
    let svd = md.clone().svd(true, true);
    let sol = svd.solve(&fine, 1e-12).unwrap();
    let res = &fine - md * sol;
    let worst = (0..res.ncols()).map(|c| res.column(c).norm()).fold(0.0_f64, f64::max);
    println!("D62 max projection residual of fine basis: {worst:.3e}");
}
