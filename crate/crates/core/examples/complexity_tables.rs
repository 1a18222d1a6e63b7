//! Detection cost for every geometry preset, from the counting rules.
//!
//! Each table counts complex multiplications per subblock under one
//! convention: an exhaustive search pays k multiplications per candidate
//! in its set, a two-stage detector pays M per subcarrier for its
//! distance table, and symbol decisions plus cancellation reuse those
//! products for free. Reductions are quoted against conventional ML.

use ofdm_im_noma::complexity::{render_table, TableScenario};

fn main() {
    for scenario in TableScenario::ALL {
        println!("[{}]", scenario.name());
        print!("{}", render_table(scenario));
        println!();
    }
}
