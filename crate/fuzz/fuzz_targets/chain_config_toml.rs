#![no_main]

use libfuzzer_sys::fuzz_target;
use rocsurf::io::parse_chain_config_toml;

fuzz_target!(|data: &str| {
    if let Ok(cfg) = parse_chain_config_toml(data) {
        assert!(cfg.n_kept() >= 1);
    }
});
