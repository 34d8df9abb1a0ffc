mod properties;
mod spectra;
