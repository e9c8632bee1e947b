use std::time::Instant;

use heatjet::heatcoeff::{difference_operator, ev_sharp_table, heat_jets_from_table};
use heatjet::jet_algebra::{Coeff, Degree, JetPoly, MultiIndex, Rat, Role};
use heatjet::laplacian::{generalized_laplacian, LaplacianSpec, MetricJets};

fn poly(n: usize, terms: &[(&[u32], Rat)]) -> JetPoly {
    JetPoly::from_terms(
        n,
        Role::Scalar,
        Degree::Full,
        terms
            .iter()
            .map(|(e, c)| (MultiIndex::new(e.to_vec()), Coeff::scalar(c.clone()))),
    )
    .unwrap()
}

fn main() {
    let t0 = Instant::now();
    let g11 = poly(2, &[(&[0, 0], Rat::one()), (&[0, 2], Rat::one())]);
    let g12 = poly(2, &[(&[1, 1], -Rat::one())]);
    let g22 = poly(2, &[(&[0, 0], Rat::one()), (&[2, 0], Rat::one())]);
    let metric = MetricJets::new(2, 32, vec![g11, g12.clone(), g12, g22]).unwrap();
    let b1 = poly(2, &[(&[0, 1], Rat::one())]).tensor(&Coeff::identity(1)).unwrap();
    let b2 = poly(2, &[(&[1, 0], Rat::new(1, 2))]).tensor(&Coeff::identity(1)).unwrap();
    let f = poly(2, &[(&[1, 1], Rat::one())]).tensor(&Coeff::identity(1)).unwrap();
    let spec = LaplacianSpec::new(metric, 1, Some(vec![b1, b2]), Some(f)).unwrap();
    let op = generalized_laplacian(&spec).unwrap();
    eprintln!("operator built in {:?}, coeff degree {:?}", t0.elapsed(), op.coeff_degree());

    let t1 = Instant::now();
    let d = difference_operator(&op, 16, Degree::at(0)).unwrap();
    eprintln!("difference series R=16 in {:?}", t1.elapsed());
    let t2 = Instant::now();
    let table = ev_sharp_table(&d).unwrap();
    eprintln!("value table in {:?}", t2.elapsed());
    let t3 = Instant::now();
    let jets = heat_jets_from_table(&table, 4, 8).unwrap();
    eprintln!("jets assembled in {:?}", t3.elapsed());
    eprintln!("a_1 terms: {}", jets.get(1).num_terms());
    eprintln!("total {:?}", t0.elapsed());
}
