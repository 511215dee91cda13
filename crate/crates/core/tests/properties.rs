use num_bigint::BigInt;
use proptest::prelude::*;

use quiverstab::exactla::{rational_reconstruct, Mat, Matrix, Rational, Scalar, Subspace, F61};
use quiverstab::gen::{gen_instance, GenSpec, InstanceClass};
use quiverstab::oracles::{koenig_disc, neighbourhood, PatternSpace};
use quiverstab::quiver::Instance;
use quiverstab::shrunk::{min_shrunk, verify_certificate, ShrunkCertificate};

fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        Mat::from_vec(rows, cols, v.into_iter().map(Rational::integer).collect()).unwrap()
    })
}

fn sized_matrix() -> impl Strategy<Value = Mat> {
    (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| int_matrix(r, c))
}

fn subspace(n: usize) -> impl Strategy<Value = Subspace> {
    (0usize..=n).prop_flat_map(move |k| int_matrix(k, n)).prop_map(move |m| Subspace::span(n, &m.row_vecs()).unwrap())
}

fn pattern() -> impl Strategy<Value = PatternSpace> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let support = (0..n * n).filter(|&k| bits[k]).map(|k| (k / n, k % n));
            PatternSpace::new(n, support).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rank_nullity(m in sized_matrix()) {
        let r = m.rank();
        prop_assert_eq!(r, m.rank_by_elimination());
        prop_assert_eq!(r + Subspace::kernel(&m).dim(), m.cols());
        prop_assert_eq!(Subspace::image(&m).dim(), r);
        let reduced: Matrix<F61> = Matrix::reduce(&m).unwrap();
        prop_assert!(reduced.rank_by_elimination() <= r);
    }

    #[test]
    fn subspace_lattice(a in subspace(4), b in subspace(4), c in subspace(4)) {
        let s = a.sum(&b).unwrap();
        let i = a.intersect(&b).unwrap();
        prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
        prop_assert!(s.contains(&a).unwrap() && a.contains(&i).unwrap());
        let ac = a.intersect(&c).unwrap();
        let lhs = ac.sum(&b).unwrap().intersect(&c).unwrap();
        let rhs = ac.sum(&b.intersect(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn preimage_maps_into_target(m in int_matrix(4, 3), t in subspace(4)) {
        let pre = Subspace::preimage(&m, &t).unwrap();
        prop_assert!(t.contains(&pre.apply(&m).unwrap()).unwrap());
        prop_assert!(pre.contains(&Subspace::kernel(&m)).unwrap());
    }

    #[test]
    fn koenig_matches_exhaustive_search(p in pattern()) {
        let (c, s) = koenig_disc(&p);
        prop_assert_eq!(s.len() - neighbourhood(&p, &s).len(), c);
        let best = (0u32..1 << p.n)
            .map(|mask| {
                let cols: Vec<usize> = (0..p.n).filter(|&j| mask >> j & 1 == 1).collect();
                cols.len() as i64 - neighbourhood(&p, &cols).len() as i64
            })
            .max()
            .unwrap();
        prop_assert_eq!(best, c as i64);
    }

    #[test]
    fn shrunk_certificates_verify(p in pattern(), seed in any::<u64>()) {
        let cert = min_shrunk(&p.to_matrix_space(), seed).unwrap();
        prop_assert_eq!(cert.c, koenig_disc(&p).0);
        prop_assert!(verify_certificate(&cert).unwrap().valid);
        let back = ShrunkCertificate::from_json_value(&cert.to_json_value()).unwrap();
        prop_assert_eq!(&back, &cert);
        prop_assert!(verify_certificate(&back).unwrap().valid);
    }

    #[test]
    fn rational_reconstruction(n in -100_000i64..100_000, d in 1i64..100_000) {
        let m = BigInt::from((1u64 << 61) - 1) * BigInt::from(4_611_686_018_427_387_847u64);
        let x = Rational::new(n, d);
        let residue = (BigInt::from(n) * BigInt::from(d).modinv(&m).unwrap()) % &m;
        prop_assert_eq!(rational_reconstruct(&residue, &m), Some(x.clone()));
        prop_assert_eq!(F61::from_rational(&x).unwrap().reconstruct(), Some(x));
    }

    #[test]
    fn generated_instances_round_trip(seed in any::<u64>(), index in 0u64..50, class in 0usize..3) {
        let class = [InstanceClass::General, InstanceClass::GeneralZeroTheta, InstanceClass::Bipartite][class];
        let spec = GenSpec::new(seed, class);
        let inst = gen_instance(&spec, index);
        prop_assert_eq!(&inst, &gen_instance(&spec, index));
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }
}
