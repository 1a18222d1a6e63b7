//! One subblock from payload bits to the superposed time-domain signal.
//!
//! Follows both users through index selection, symbol placement, the
//! power-weighted superposition, and the cyclic-prefixed IFFT output.

use ofdm_im_noma::constellation::Constellation;
use ofdm_im_noma::fft::Dft;
use ofdm_im_noma::im_mapping::{IndexLookupTable, SubblockPayload};
use ofdm_im_noma::tx_chain::{build_subblock, ifft_with_cp, superimpose, SuperpositionSpec};
use ofdm_im_noma::Complex64;
use std::f64::consts::FRAC_PI_2;

fn main() {
    let table = IndexLookupTable::new(4, 2).unwrap();
    let plain = Constellation::bpsk();
    let rotated = plain.rotated(FRAC_PI_2);
    let spec = SuperpositionSpec::new(0.1, 1.0).unwrap();

    let near_payload = SubblockPayload { index_word: 0b11, symbol_word: 0b01 };
    let far_payload = SubblockPayload { index_word: 0b00, symbol_word: 0b10 };

    let mut near = [Complex64::new(0.0, 0.0); 4];
    let mut far = [Complex64::new(0.0, 0.0); 4];
    build_subblock(near_payload, &table, &rotated, &mut near);
    build_subblock(far_payload, &table, &plain, &mut far);

    println!("near user: index word 11 -> subcarriers {:?}", table.active_indices(0b11));
    println!("           rotated symbols   {near:?}");
    println!("far user:  index word 00 -> subcarriers {:?}", table.active_indices(0b00));
    println!("           plain symbols     {far:?}");

    let composite = superimpose(&near, &far, spec);
    println!(
        "\npower split: near {:.3} of total, far {:.3}",
        spec.near_power(),
        spec.far_power()
    );
    println!("superposed subblock:");
    for (i, x) in composite.iter().enumerate() {
        println!("  subcarrier {i}: {x}");
    }

    let dft = Dft::new(4);
    let tx = ifft_with_cp(&composite, &dft, 2);
    println!("\ntime-domain frame with a 2-sample prefix ({} samples):", tx.samples.len());
    for (i, s) in tx.samples.iter().enumerate() {
        let tag = if i < 2 { " (prefix)" } else { "" };
        println!("  t = {i}: {s:.4}{tag}");
    }
    let body_energy: f64 = tx.body().iter().map(|s| s.norm_sqr()).sum();
    let freq_energy: f64 = composite.iter().map(|s| s.norm_sqr()).sum();
    println!("body energy {body_energy:.6} matches subcarrier energy {freq_energy:.6}");
}
