use ellstat_ffi::*;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    unsafe { ellstat_last_error(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn curve_roundtrip() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { ellstat_curve_new(16, 16, &mut h) },
        EllstatStatus::Ok
    );
    let mut inv = EllstatInvariants::default();
    assert_eq!(
        unsafe { ellstat_curve_invariants(h, &mut inv) },
        EllstatStatus::Ok
    );
    assert_eq!(
        (inv.delta, inv.conductor, inv.index, inv.q, inv.d),
        (-91, 91, 1, 1, -91)
    );
    assert_eq!(inv.bad_primes, 2);
    let mut buf = [0 as c_char; 8];
    assert_eq!(
        unsafe { ellstat_curve_symbol(h, 7, buf.as_mut_ptr(), buf.len()) },
        EllstatStatus::Ok
    );
    assert_eq!(
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(),
        "I1"
    );
    let mut tiny = [0 as c_char; 2];
    assert_eq!(
        unsafe { ellstat_curve_symbol(h, 7, tiny.as_mut_ptr(), tiny.len()) },
        EllstatStatus::BufferTooSmall
    );
    unsafe { ellstat_curve_free(h) };
    unsafe { ellstat_curve_free(ptr::null_mut()) };
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { ellstat_curve_new(-3, 2, &mut h) },
        EllstatStatus::Degenerate
    );
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    // good reduction at 3 fails for A = 3, B = 16
    assert_eq!(
        unsafe { ellstat_curve_new(3, 16, &mut h) },
        EllstatStatus::BadAt2Or3
    );
    assert_eq!(
        unsafe { ellstat_curve_new(16, 16, ptr::null_mut()) },
        EllstatStatus::NullPointer
    );
    let mut inv = EllstatInvariants::default();
    assert_eq!(
        unsafe { ellstat_curve_invariants(ptr::null(), &mut inv) },
        EllstatStatus::NullPointer
    );
}

#[test]
fn density_and_constants() {
    let sym = CString::new("III").unwrap();
    let mut buf = [0 as c_char; 32];
    assert_eq!(
        unsafe { ellstat_symbol_density(5, sym.as_ptr(), buf.as_mut_ptr(), buf.len()) },
        EllstatStatus::Ok
    );
    assert_eq!(
        unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap(),
        "4/625"
    );
    let bad = CString::new("V").unwrap();
    assert_eq!(
        unsafe { ellstat_symbol_density(5, bad.as_ptr(), buf.as_mut_ptr(), buf.len()) },
        EllstatStatus::InvalidArgument
    );
    let name = CString::new("generic").unwrap();
    let (mut lo, mut hi) = (0.0, 0.0);
    assert_eq!(
        unsafe { ellstat_constant(name.as_ptr(), 1000, &mut lo, &mut hi) },
        EllstatStatus::Ok
    );
    assert!(lo <= hi && hi - lo < 1e-12 && (lo - 0.191_541_617).abs() < 1e-8);
}

#[test]
fn census_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { ellstat_census_run(20_000, 1.5, false, 10, &mut h) },
        EllstatStatus::Ok
    );
    let mut n = 0usize;
    assert_eq!(
        unsafe { ellstat_census_grid_len(h, &mut n) },
        EllstatStatus::Ok
    );
    assert!(n >= 2);
    let fam = CString::new("E_sf").unwrap();
    let e = CString::new("E").unwrap();
    let (mut x, mut c_sf, mut c_e) = (0u64, 0u64, 0u64);
    assert_eq!(
        unsafe { ellstat_census_count(h, fam.as_ptr(), n - 1, &mut x, &mut c_sf) },
        EllstatStatus::Ok
    );
    assert_eq!(
        unsafe { ellstat_census_count(h, e.as_ptr(), n - 1, &mut x, &mut c_e) },
        EllstatStatus::Ok
    );
    assert_eq!(x, 20_000);
    assert!(c_sf <= c_e && c_e > 0);
    assert_eq!(
        unsafe { ellstat_census_count(h, e.as_ptr(), n, &mut x, &mut c_e) },
        EllstatStatus::InvalidArgument
    );
    let mut buf = vec![0 as c_char; 1 << 16];
    assert_eq!(
        unsafe { ellstat_census_json(h, buf.as_mut_ptr(), buf.len()) },
        EllstatStatus::Ok
    );
    let s = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(s).unwrap();
    assert!(v["families"]["E_sf"]["counts"].is_array());
    unsafe { ellstat_census_free(h) };
}

#[test]
fn header_declares_every_export() {
    let h =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/ellstat.h")).unwrap();
    for f in [
        "ellstat_last_error",
        "ellstat_curve_new",
        "ellstat_curve_free",
        "ellstat_curve_invariants",
        "ellstat_curve_symbol",
        "ellstat_symbol_density",
        "ellstat_constant",
        "ellstat_census_run",
        "ellstat_census_free",
        "ellstat_census_grid_len",
        "ellstat_census_count",
        "ellstat_census_json",
    ] {
        assert!(h.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(h.contains("typedef struct EllstatCurve EllstatCurve;"));
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let inc = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = std::env::temp_dir().join(format!("ellstat_hdr_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("t.c");
    std::fs::write(&src, "#include \"ellstat.h\"\nint main(void) { EllstatInvariants v; (void)v; return ELLSTAT_STATUS_OK; }\n")
        .unwrap();
    match std::process::Command::new(&cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-I", inc])
        .arg(&src)
        .status()
    {
        Ok(s) => assert!(s.success(), "header does not compile"),
        Err(_) => eprintln!("no C compiler found; skipped"),
    }
}
