fn main() { println!("polkern"); }
