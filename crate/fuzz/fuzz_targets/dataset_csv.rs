#![no_main]

use libfuzzer_sys::fuzz_target;
use rocsurf::io::parse_dataset_csv;

fuzz_target!(|data: &str| {
    if let Ok(d) = parse_dataset_csv(data) {
        assert_eq!(d.s.len(), d.l.len());
        assert!(d.s.iter().all(|v| v.is_finite()));
    }
});
