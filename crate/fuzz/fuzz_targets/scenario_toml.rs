#![no_main]

use libfuzzer_sys::fuzz_target;
use rocsurf::io::parse_scenario_toml;

fuzz_target!(|data: &str| {
    if let Ok((sc, cfg)) = parse_scenario_toml(data) {
        // Anything accepted must also pass validation on its own.
        assert!(sc.validate().is_ok());
        assert!(cfg.validate().is_ok());
    }
});
