use flatrack_core::flat::FlatTransform;
use flatrack_core::linalg::{dist2, Vector};
use flatrack_core::plants::*;
use flatrack_core::sim::rk4_step;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn plants() -> Vec<Box<dyn Plant>> {
    vec![
        plant_by_name("pendulum").unwrap(),
        plant_by_name("bicycle").unwrap(),
        plant_by_name("chain3").unwrap(),
    ]
}

#[test]
fn transform_round_trips() {
    for plant in plants() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (x, u) = plant.sample_valid(&mut rng);
            let z = plant.phi(&x).unwrap();
            let x_back = plant.phi_inv(&z).unwrap();
            assert!(dist2(&x, &x_back) <= 1e-9 * x.norm().max(1.0), "{} phi {x:?}", plant.name());
            let v = plant.gamma_fwd(&x, &u).unwrap();
            let u_back = plant.gamma_inv(&z, &v).unwrap();
            assert!(dist2(&u, &u_back) <= 1e-9 * u.norm().max(1.0), "{} gamma {x:?} {u:?}", plant.name());
        }
    }
}

#[test]
fn flat_coordinates_follow_flat_dynamics() {
    // d/dt Φ(x) along ẋ = f(x, u) equals A Φ(x) + B Γ(x, u)
    for plant in plants() {
        let fs = plant.flat_system().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let (x, u) = plant.sample_valid(&mut rng);
            let f = plant.dynamics(&x, &u).unwrap();
            let h = 1e-6;
            let zp = plant.phi(&x.axpy(h, &f)).unwrap();
            let zm = plant.phi(&x.axpy(-h, &f)).unwrap();
            let zdot = (&zp - &zm).scale(0.5 / h);
            let z = plant.phi(&x).unwrap();
            let v = plant.gamma_fwd(&x, &u).unwrap();
            let expect = fs.flow(&z, &v);
            let err = dist2(&zdot, &expect);
            assert!(err <= 1e-5 * expect.norm().max(1.0), "{} err {err}", plant.name());
        }
    }
}

#[test]
fn input_jacobian_matches_finite_differences() {
    for plant in plants() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let (x, u) = plant.sample_valid(&mut rng);
            let jac = plant.dgamma_du(&x, &u).unwrap();
            for j in 0..u.dim() {
                let h = 1e-6 * u[j].abs().max(1.0);
                let mut up = u.clone();
                let mut um = u.clone();
                up[j] += h;
                um[j] -= h;
                let col = (&plant.gamma_fwd(&x, &up).unwrap() - &plant.gamma_fwd(&x, &um).unwrap())
                    .scale(0.5 / h);
                for i in 0..col.dim() {
                    assert!((col[i] - jac[(i, j)]).abs() <= 1e-5 * jac.max_abs().max(1.0));
                }
            }
        }
    }
}

#[test]
fn origin_is_an_equilibrium_where_admissible() {
    for plant in plants() {
        if !plant.origin_admissible() {
            continue;
        }
        let f = plant
            .dynamics(&vec![0.0; plant.state_dim()], &vec![0.0; plant.input_dim()])
            .unwrap();
        assert!(f.norm() == 0.0, "{}", plant.name());
    }
    assert!(!plant_by_name("bicycle").unwrap().origin_admissible());
}

#[test]
fn pendulum_conserves_energy_without_force() {
    let params = PendulumParams::default();
    let plant = Pendulum::new(params).unwrap();
    let mut x = Vector(vec![0.4, -0.3]);
    let e0 = pendulum_energy(&params, &x);
    for _ in 0..1000 {
        x = rk4_step(|s| plant.dynamics(s, &[0.0]), &x, 1e-3).unwrap();
    }
    assert!(x[0].abs() < 1.4);
    let drift = (pendulum_energy(&params, &x) - e0).abs();
    assert!(drift < 1e-9 * e0.abs(), "drift {drift}");
}

#[test]
fn bicycle_flat_inverse_matches_forward_map() {
    let params = BicycleParams::default();
    let plant = Bicycle::new(params).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let (x, u) = plant.sample_valid(&mut rng);
        let z = plant.phi(&x).unwrap();
        let v = plant.gamma_fwd(&x, &u).unwrap();
        let (xb, ub) = bicycle_flat_inverse(&params, &z, &v).unwrap();
        assert!(dist2(&ub, &u) < 1e-9);
        // heading is recovered modulo 2π
        let dpsi = (xb[3] - x[3]).rem_euclid(std::f64::consts::TAU);
        assert!(dpsi < 1e-9 || std::f64::consts::TAU - dpsi < 1e-9);
        assert!(dist2(&xb[..3], &x[..3]) < 1e-9);
    }
    assert!(bicycle_flat_inverse(&params, &[0.0; 4], &[1.0, 0.0]).is_err());
}
