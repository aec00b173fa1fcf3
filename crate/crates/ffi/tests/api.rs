use std::ffi::{c_char, CStr, CString};
use std::ptr;

use affine_cluster::fixtures;
use affine_cluster::theta::ThetaEngine;
use affine_cluster_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { ac_string_free(s) };
    out
}

fn last_error() -> Option<String> {
    let p = ac_last_error();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string())
}

fn fixture(name: &str) -> *mut AcEngine {
    let name = CString::new(name).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { ac_engine_from_fixture(name.as_ptr(), &mut e) }, AcStatus::Ok);
    e
}

fn flat(name: &str) -> Vec<i64> {
    fixtures::matrix(name).concat()
}

#[test]
fn engine_queries() {
    let e = fixture("A2tilde");
    let lib = ThetaEngine::new(&fixtures::matrix("A2tilde")).unwrap();
    unsafe {
        let mut n = 0;
        assert_eq!(ac_engine_rank(e, &mut n), AcStatus::Ok);
        assert_eq!(n, 3);
        let mut delta = [0i64; 3];
        assert_eq!(ac_engine_delta(e, delta.as_mut_ptr(), 3), AcStatus::Ok);
        assert_eq!(delta, [1, 1, 1]);
        let mut nu = [0i64; 3];
        assert_eq!(ac_engine_nu_c(e, delta.as_ptr(), nu.as_mut_ptr(), 3), AcStatus::Ok);
        assert_eq!(nu.to_vec(), lib.data.nu_c(&lib.data.delta).unwrap().0);

        let mut tubes = 0;
        assert_eq!(ac_engine_tube_count(e, &mut tubes), AcStatus::Ok);
        assert_eq!(tubes, 1);
        let mut size = 0;
        assert_eq!(ac_engine_tube_size(e, 0, &mut size), AcStatus::Ok);
        assert_eq!(size, 2);
        let mut beta = [0i64; 3];
        assert_eq!(ac_engine_tube_element(e, 0, 1, beta.as_mut_ptr(), 3), AcStatus::Ok);
        assert_eq!(beta.to_vec(), lib.tubes[0].orbit[1].0);
        assert_eq!(ac_engine_tube_size(e, 1, &mut size), AcStatus::InvalidArgument);

        let mut s = ptr::null_mut();
        assert_eq!(ac_engine_theta_k_delta(e, 2, &mut s), AcStatus::Ok);
        assert_eq!(take(s), lib.theta_k_delta(2).unwrap().poly.to_string());
        assert_eq!(ac_engine_theta(e, nu.as_ptr(), 3, &mut s), AcStatus::Ok);
        assert_eq!(take(s), lib.theta_delta().unwrap().poly.to_string());
        // g-vector of an initial cluster variable
        let g = [1i64, 0, 0];
        assert_eq!(ac_engine_theta(e, g.as_ptr(), 3, &mut s), AcStatus::Ok);
        assert_eq!(take(s), "x1");
        ac_engine_free(e);
    }
}

#[test]
fn verify_through_the_abi() {
    let e = fixture("C2tilde");
    unsafe {
        let ids = CString::new("cheby,imexch").unwrap();
        let mut checked = 0;
        assert_eq!(ac_engine_verify(e, ids.as_ptr(), 0, &mut checked), AcStatus::Ok);
        assert!(checked > 0);
        assert_eq!(last_error(), None);
        let bogus = CString::new("bogus").unwrap();
        assert_eq!(ac_engine_verify(e, bogus.as_ptr(), 0, ptr::null_mut()), AcStatus::InvalidArgument);
        assert!(last_error().unwrap().contains("bogus"));
        ac_engine_free(e);
    }
}

#[test]
fn construction_errors() {
    unsafe {
        let mut e = ptr::null_mut();
        let finite = [0i64, 1, -1, 0];
        assert_eq!(ac_engine_new(finite.as_ptr(), 2, &mut e), AcStatus::NotAffine);
        let cyclic = [0i64, 1, -1, -1, 0, 1, 1, -1, 0];
        assert_eq!(ac_engine_new(cyclic.as_ptr(), 3, &mut e), AcStatus::NotAcyclic);
        let unsym = [0i64, 1, 1, 0];
        assert_eq!(ac_engine_new(unsym.as_ptr(), 2, &mut e), AcStatus::InvalidArgument);
        assert!(last_error().unwrap().contains("skew-symmetrizable"));
        assert_eq!(ac_engine_new(ptr::null(), 2, &mut e), AcStatus::NullPointer);
        assert_eq!(ac_engine_new(finite.as_ptr(), 0, &mut e), AcStatus::InvalidArgument);
        assert!(e.is_null());
        let name = CString::new("no-such").unwrap();
        assert_eq!(ac_engine_from_fixture(name.as_ptr(), &mut e), AcStatus::InvalidArgument);
        assert_eq!(ac_engine_from_fixture(ptr::null(), &mut e), AcStatus::NullPointer);

        let b = flat("kronecker");
        assert_eq!(ac_engine_new(b.as_ptr(), 2, ptr::null_mut()), AcStatus::NullPointer);
        assert_eq!(ac_engine_new(b.as_ptr(), 2, &mut e), AcStatus::Ok);
        let mut d = [0i64; 3];
        assert_eq!(ac_engine_delta(e, d.as_mut_ptr(), 3), AcStatus::InvalidArgument);
        assert_eq!(ac_engine_delta(ptr::null(), d.as_mut_ptr(), 2), AcStatus::NullPointer);
        assert_eq!(ac_engine_delta(e, d.as_mut_ptr(), 2), AcStatus::Ok);
        assert_eq!(d[..2], [1, 1]);
        let negative = [-1i64, 0];
        assert_eq!(ac_engine_nu_c(e, negative.as_ptr(), d.as_mut_ptr(), 2), AcStatus::InvalidArgument);
        ac_engine_free(e);
        ac_engine_free(ptr::null_mut());
    }
}

#[test]
fn seeds() {
    let b = flat("kronecker");
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ac_seed_new(b.as_ptr(), 2, &mut s), AcStatus::Ok);
        assert_eq!(ac_seed_mutate(s, 0), AcStatus::Ok);
        let mut x = ptr::null_mut();
        assert_eq!(ac_seed_cluster_variable(s, 0, &mut x), AcStatus::Ok);
        assert_eq!(take(x), "x1^-1*x2^2 + x1^-1*y1");
        let mut g = [0i64; 2];
        assert_eq!(ac_seed_g_vector(s, 0, g.as_mut_ptr(), 2), AcStatus::Ok);
        assert_eq!(g, [-1, 2]);
        assert_eq!(ac_seed_mutate(s, 0), AcStatus::Ok);
        assert_eq!(ac_seed_cluster_variable(s, 0, &mut x), AcStatus::Ok);
        assert_eq!(take(x), "x1");
        assert_eq!(ac_seed_mutate(s, 2), AcStatus::InvalidArgument);
        assert_eq!(ac_seed_cluster_variable(s, 2, &mut x), AcStatus::InvalidArgument);
        assert_eq!(ac_seed_mutate(ptr::null_mut(), 0), AcStatus::NullPointer);
        ac_seed_free(s);
    }
}

#[test]
fn scattering() {
    let b = flat("kronecker");
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(ac_scatter2_new(b.as_ptr(), 8, &mut sc), AcStatus::Ok);
        let mut walls = 0;
        assert_eq!(ac_scatter2_wall_count(sc, &mut walls), AcStatus::Ok);
        assert_eq!(walls, 9);
        let mut ok = false;
        assert_eq!(ac_scatter2_is_consistent(sc, &mut ok), AcStatus::Ok);
        assert!(ok);
        let lambda = [-1i64, 1];
        let mut t = ptr::null_mut();
        assert_eq!(ac_scatter2_theta(sc, lambda.as_ptr(), 8, &mut t), AcStatus::Ok);
        assert_eq!(take(t), "x1*x2^-1*y1*y2 + x1^-1*x2 + x1^-1*x2^-1*y1");
        assert_eq!(ac_scatter2_theta(sc, lambda.as_ptr(), 9, &mut t), AcStatus::InvalidArgument);
        ac_scatter2_free(sc);

        let three = flat("A2tilde");
        assert_eq!(ac_scatter2_new(three.as_ptr(), 4, &mut sc), AcStatus::InvalidArgument);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(ac_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let mut e = ptr::null_mut();
        assert_eq!(ac_engine_new(ptr::null(), 2, &mut e), AcStatus::NullPointer);
    }
    assert!(last_error().is_some());
    let other = std::thread::spawn(last_error).join().unwrap();
    assert_eq!(other, None);
}
