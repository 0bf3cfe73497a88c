use varsep_core::cones::Flavor;
use varsep_core::extremality::PerturbationFamily;
use varsep_core::geometry::{PiecewiseFn, SetExpr, SetValuedMap, Side};
use varsep_core::separation::*;
use varsep_core::setopt::*;
use varsep_core::tol::ToleranceConfig;

fn main() {
    let cfg = ToleranceConfig::default();
    let f = PiecewiseFn::new(vec![0.0], vec![vec![0.0, 1.0], vec![0.0, 0.0, -1.0]]).unwrap();
    let t = Triple {
        map: SetValuedMap::new(1, 1, SetExpr::EpiRegion { f, side: Side::Above }).unwrap(),
        omega: SetExpr::interval(-2.0, 2.0),
        cone_k: SetExpr::halfline_le(0.0),
        base_x: vec![0.0],
        base_y: vec![0.0],
    };
    let xi = PerturbationFamily::Translations {
        base: SetExpr::halfline_le(0.0),
        bound_lo: vec![-4.0],
        bound_hi: vec![4.0],
    };
    let (sets, base) = embed_triple(&t, &cfg).unwrap();
    let (fams, _cat) = embed_families(&t, &xi).unwrap();
    let region = SetExpr::Box { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] };
    for k in 1..=6 {
        let eps = 0.5_f64.powi(k);
        let t0 = std::time::Instant::now();
        match certify_approx_stationarity(&sets, &fams, &base, eps, 0.9, Flavor::Frechet, &region, &cfg) {
            Ok(c) => println!("k={k} OK y1*={:?} in {:?}", &c.duals[0][1..], t0.elapsed()),
            Err(e) => println!("k={k} ERR {e} in {:?}", t0.elapsed()),
        }
    }
}
