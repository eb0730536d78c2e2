#![allow(dead_code)]

use orthocalc_core::mat2::{c, LineMatrix, Mat2, C, SL2};
use rand::Rng;

pub fn rc<R: Rng>(rng: &mut R) -> C {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_line<R: Rng>(rng: &mut R) -> LineMatrix {
    loop {
        let l = LineMatrix::from_coords([rc(rng), rc(rng), rc(rng)]);
        if l.det().norm() > 0.2 {
            return l.normalized().unwrap();
        }
    }
}

pub fn random_sl2<R: Rng>(rng: &mut R) -> SL2 {
    loop {
        let m = Mat2::new(rc(rng), rc(rng), rc(rng), rc(rng));
        if m.det().norm() > 0.1 {
            return SL2::normalized(m).unwrap();
        }
    }
}

pub fn random_loxodromic<R: Rng>(rng: &mut R) -> SL2 {
    loop {
        let h = random_sl2(rng);
        if (h.tr() * h.tr() - 4.0).norm() > 0.1 {
            return h;
        }
    }
}
