//! Exercises the C ABI exactly as a foreign caller would: raw pointers,
//! status codes, caller-owned buffers.

use qmfg_ffi::*;

fn contractive() -> QmfgModelParams {
    QmfgModelParams {
        a: -0.15,
        b: 0.75,
        r: 3.5,
        sigma: 1.0,
        q: 0.45,
        alpha: 0.975,
        mu0: 1.0,
        v0: 0.5,
        horizon: 0.2,
    }
}

#[test]
fn solve_copy_paths_and_free() {
    let params = contractive();
    let mut options = qmfg_default_options();
    options.n_steps = 500;
    let mut handle: *mut QmfgSolution = std::ptr::null_mut();
    let status = unsafe { qmfg_solve(&params, &options, &mut handle) };
    assert_eq!(status, QmfgStatus::Ok);
    assert!(!handle.is_null());

    unsafe {
        assert!(qmfg_solution_converged(handle));
        assert!(qmfg_solution_iterations(handle) > 0);
        assert!(qmfg_solution_final_update_norm(handle) <= 1e-10);

        let n = qmfg_solution_n_nodes(handle);
        assert_eq!(n, 501);
        let mut gain = vec![0.0f64; n];
        let mut variance = vec![0.0f64; n];
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::Gain, gain.as_mut_ptr(), n),
            QmfgStatus::Ok
        );
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::Variance, variance.as_mut_ptr(), n),
            QmfgStatus::Ok
        );
        assert_eq!(gain[n - 1], 0.0);
        assert_eq!(variance[0], 0.5);
        assert!(gain.iter().all(|v| *v >= 0.0));

        // plain solutions carry no special-case paths
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::DecouplingGain, gain.as_mut_ptr(), n),
            QmfgStatus::NoSuchPath
        );
        // short buffers are rejected
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::Gain, gain.as_mut_ptr(), n - 1),
            QmfgStatus::BufferTooSmall
        );
        qmfg_solution_free(handle);
    }
}

#[test]
fn special_case_exposes_identity_path() {
    let params = contractive();
    let mut options = qmfg_default_options();
    options.n_steps = 500;
    let mut handle: *mut QmfgSolution = std::ptr::null_mut();
    let status = unsafe { qmfg_solve_special(&params, &options, &mut handle) };
    assert_eq!(status, QmfgStatus::Ok);
    unsafe {
        let n = qmfg_solution_n_nodes(handle);
        let mut gain = vec![0.0f64; n];
        let mut decoupling = vec![0.0f64; n];
        let mut identity = vec![0.0f64; n];
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::Gain, gain.as_mut_ptr(), n),
            QmfgStatus::Ok
        );
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::DecouplingGain, decoupling.as_mut_ptr(), n),
            QmfgStatus::Ok
        );
        assert_eq!(
            qmfg_solution_path(handle, QmfgPath::GainIdentity, identity.as_mut_ptr(), n),
            QmfgStatus::Ok
        );
        for k in 0..n {
            assert!(identity[k].abs() <= 1e-8);
            assert!((gain[k] + decoupling[k] - identity[k]).abs() <= 1e-15);
        }
        qmfg_solution_free(handle);
    }
}

#[test]
fn status_codes_for_bad_inputs() {
    let options = qmfg_default_options();
    let mut handle: *mut QmfgSolution = std::ptr::null_mut();

    // null pointers
    let status = unsafe { qmfg_solve(std::ptr::null(), &options, &mut handle) };
    assert_eq!(status, QmfgStatus::NullPointer);

    // violated standing assumption: b = 0
    let mut bad = contractive();
    bad.b = 0.0;
    let status = unsafe { qmfg_solve(&bad, &options, &mut handle) };
    assert_eq!(status, QmfgStatus::InvalidArgument);
    assert!(handle.is_null());

    // out-of-range quantile level
    let mut out = 0.0f64;
    assert_eq!(
        unsafe { qmfg_probit(1.5, &mut out) },
        QmfgStatus::InvalidArgument
    );

    // empty sample
    let values: [f64; 0] = [];
    assert_eq!(
        unsafe { qmfg_empirical_quantile(values.as_ptr(), 0, 0.5, &mut out) },
        QmfgStatus::InvalidArgument
    );

    // freeing null is a no-op
    unsafe { qmfg_solution_free(std::ptr::null_mut()) };
}

#[test]
fn non_convergence_still_returns_a_flagged_handle() {
    let params = contractive();
    let mut options = qmfg_default_options();
    options.n_steps = 200;
    options.max_iters = 2;
    options.picard_tol = 1e-15;
    let mut handle: *mut QmfgSolution = std::ptr::null_mut();
    let status = unsafe { qmfg_solve(&params, &options, &mut handle) };
    assert_eq!(status, QmfgStatus::NonConvergence);
    assert!(!handle.is_null());
    unsafe {
        assert!(!qmfg_solution_converged(handle));
        assert_eq!(qmfg_solution_iterations(handle), 2);
        qmfg_solution_free(handle);
    }
}

#[test]
fn scalar_helpers_match_reference_values() {
    let mut out = 0.0f64;
    assert_eq!(unsafe { qmfg_probit(0.975, &mut out) }, QmfgStatus::Ok);
    assert!((out - 1.959_963_984_540_054).abs() < 1e-10);

    let values = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    assert_eq!(
        unsafe { qmfg_empirical_quantile(values.as_ptr(), values.len(), 0.95, &mut out) },
        QmfgStatus::Ok
    );
    assert_eq!(out, 9.0);

    let params = contractive();
    assert_eq!(
        unsafe { qmfg_feedback_control(&params, 0.1, -0.05, 1.0, &mut out) },
        QmfgStatus::Ok
    );
    assert!((out + 0.010_714_285_714_285_714).abs() < 1e-15);

    let mut report = QmfgConditionReport {
        mu_star: 0.0,
        m: 0.0,
        existence_lhs: 0.0,
        existence_holds: false,
        contraction_lhs: 0.0,
        contraction_holds: false,
    };
    assert_eq!(
        unsafe { qmfg_check_conditions(&params, 3.0, &mut report) },
        QmfgStatus::Ok
    );
    assert!(report.existence_holds);
    assert!(report.contraction_holds);
    assert!((report.mu_star - 1.0).abs() < 1e-15);
}

#[test]
fn generated_header_declares_the_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/qmfg.h"),
    )
    .expect("cbindgen header exists");
    for symbol in [
        "qmfg_solve",
        "qmfg_solve_special",
        "qmfg_solution_free",
        "qmfg_solution_path",
        "qmfg_probit",
        "qmfg_check_conditions",
        "QMFG_STATUS_NON_CONVERGENCE",
        "typedef struct QmfgSolution QmfgSolution;",
    ] {
        assert!(header.contains(symbol), "header is missing `{symbol}`");
    }
}
