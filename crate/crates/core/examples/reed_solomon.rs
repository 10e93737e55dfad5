//! Reed–Solomon errors-and-erasures decoding, and the index-headed outer code
//! recovering from lost, reordered and duplicated symbols.

use repeatcode::outer::{GaloisField, OuterCode, OuterCodeParams, ReedSolomon};
use repeatcode::BitString;

pub fn run() -> repeatcode::Result<()> {
    let rs = ReedSolomon::new(GaloisField::new(4)?, 15, 11)?;
    let data: Vec<u16> = (1..=11).collect();
    let codeword = rs.encode(&data)?;
    let mut received: Vec<Option<u16>> = codeword.iter().copied().map(Some).collect();
    received[2] = Some(codeword[2] ^ 5);
    received[9] = None;
    received[12] = None;
    let out = rs.decode(&received)?;
    println!("1 error + 2 erasures: recovered = {}, errors {}, erasures {}", out.codeword == codeword, out.errors, out.erasures);

    let outer = OuterCode::new(OuterCodeParams::new(4, 15, 11))?;
    let message: BitString = "10110011100011110000101011001100110100101011".parse()?;
    let mut symbols = outer.encode(&message)?;
    symbols.reverse();
    symbols.remove(4);
    symbols.push(symbols[0].clone());
    println!("{} symbols of {} bits after loss and duplication", symbols.len(), outer.symbol_bits());
    println!("decoded matches: {}", outer.decode(&symbols)? == message);
    Ok(())
}

fn main() -> repeatcode::Result<()> {
    run()
}
