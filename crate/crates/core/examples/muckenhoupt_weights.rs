//! Dyadic estimates of the A_p constant for power weights |x|^a on [0, 1].
//! |x|^a is in A_2 on the line exactly for -1 < a < 1.

use bbmlab::spaces::{ap_constant, Weight};

fn main() -> bbmlab::Result<()> {
    for a in [-0.5, 0.5, 0.9, 1.5] {
        let w = Weight::Power { a };
        let values: Vec<String> = (2..=10)
            .step_by(2)
            .map(|d| ap_constant(&w, 2.0, &[0.0], &[1.0], d).map(|e| format!("{:.3}", e.value)))
            .collect::<bbmlab::Result<_>>()?;
        println!("a = {a:<5} depths 2,4,..,10: {}", values.join(" "));
    }
    Ok(())
}
