//! Clifford basis changes stored as images of the single-qubit generators.

use crate::pauli::{Pauli, PauliError, PauliString, Phase};

/// Symplectic map given by the images of `X_j` and `Z_j` for every site.
///
/// The images are Hermitian strings; together they must satisfy the
/// canonical commutation pattern, which makes the map an automorphism of
/// the Pauli group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymplecticMap {
    n: usize,
    x_images: Vec<PauliString>,
    z_images: Vec<PauliString>,
}

impl SymplecticMap {
    pub fn identity(n: usize) -> Self {
        let x_images = (0..n).map(|j| PauliString::single(n, j, Pauli::X).unwrap()).collect();
        let z_images = (0..n).map(|j| PauliString::single(n, j, Pauli::Z).unwrap()).collect();
        SymplecticMap { n, x_images, z_images }
    }

    pub fn from_images(
        x_images: Vec<PauliString>,
        z_images: Vec<PauliString>,
    ) -> Result<Self, PauliError> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(PauliError::LengthMismatch { left: n, right: z_images.len() });
        }
        for img in x_images.iter().chain(&z_images) {
            if img.n_qubits() != n {
                return Err(PauliError::LengthMismatch { left: n, right: img.n_qubits() });
            }
            if !img.is_hermitian() {
                return Err(PauliError::InvalidMap("image is not Hermitian"));
            }
        }
        for j in 0..n {
            for k in 0..n {
                if x_images[j].symplectic(&x_images[k]) || z_images[j].symplectic(&z_images[k]) {
                    return Err(PauliError::InvalidMap("images of like generators anticommute"));
                }
                if x_images[j].symplectic(&z_images[k]) != (j == k) {
                    return Err(PauliError::InvalidMap("X/Z image pattern is not canonical"));
                }
            }
        }
        Ok(SymplecticMap { n, x_images, z_images })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, site: usize) -> &PauliString {
        &self.x_images[site]
    }

    pub fn z_image(&self, site: usize) -> &PauliString {
        &self.z_images[site]
    }

    /// `2N × 2N` binary matrix acting on column vectors `(x | z)`; column `j`
    /// holds the bits of the image of basis vector `j`.
    pub fn matrix(&self) -> Vec<Vec<bool>> {
        let n = self.n;
        let mut m = vec![vec![false; 2 * n]; 2 * n];
        for (col, img) in self.x_images.iter().chain(&self.z_images).enumerate() {
            for s in 0..n {
                m[s][col] = img.x_bit(s);
                m[n + s][col] = img.z_bit(s);
            }
        }
        m
    }

    /// Signs of the images of `X_1..X_N, Z_1..Z_N`.
    pub fn sign_table(&self) -> Vec<i8> {
        self.x_images
            .iter()
            .chain(&self.z_images)
            .map(|img| img.phase().sign().expect("images are Hermitian"))
            .collect()
    }

    pub(crate) fn apply_unchecked(&self, p: &PauliString) -> PauliString {
        // p = i^(k + #Y) ∏_j X_j^x Z_j^z, with X to the left of Z on each site
        let lead = Phase::from_exponent(p.phase().exponent() as i64 + p.y_count() as i64);
        let mut acc = PauliString::identity(self.n).with_phase(lead);
        for j in 0..self.n {
            if p.x_bit(j) {
                acc = acc.mul_unchecked(&self.x_images[j]);
            }
            if p.z_bit(j) {
                acc = acc.mul_unchecked(&self.z_images[j]);
            }
        }
        acc
    }

    pub fn apply_map(&self, p: &PauliString) -> Result<PauliString, PauliError> {
        if p.n_qubits() != self.n {
            return Err(PauliError::LengthMismatch { left: self.n, right: p.n_qubits() });
        }
        Ok(self.apply_unchecked(p))
    }

    pub fn inverse(&self) -> SymplecticMap {
        let n = self.n;
        let preimage = |target: &PauliString| {
            // ⟨Q, X_k⟩ = z_k(Q) and ⟨Q, Z_k⟩ = x_k(Q), preserved by the map
            let x: Vec<bool> = (0..n).map(|k| target.symplectic(&self.z_images[k])).collect();
            let z: Vec<bool> = (0..n).map(|k| target.symplectic(&self.x_images[k])).collect();
            let q = PauliString::from_bits(&x, &z, Phase::ONE).expect("equal lengths");
            let image = self.apply_unchecked(&q);
            debug_assert_eq!(image.unsigned(), target.unsigned());
            let fix = Phase::from_exponent(
                target.phase().exponent() as i64 - image.phase().exponent() as i64,
            );
            q.with_phase(fix)
        };
        let x_images = (0..n)
            .map(|j| preimage(&PauliString::single(n, j, Pauli::X).unwrap()))
            .collect();
        let z_images = (0..n)
            .map(|j| preimage(&PauliString::single(n, j, Pauli::Z).unwrap()))
            .collect();
        SymplecticMap { n, x_images, z_images }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn identity_map_fixes_strings() {
        let m = SymplecticMap::identity(3);
        for s in ["XYZ", "-iZZI", "IYI"] {
            assert_eq!(m.apply_map(&p(s)).unwrap(), p(s));
        }
    }

    #[test]
    fn hadamard_like_map_and_inverse() {
        // X -> Z, Z -> X on site 0; Y -> -Y follows from Y = iXZ
        let m = SymplecticMap::from_images(vec![p("ZI"), p("IX")], vec![p("XI"), p("IZ")])
            .unwrap();
        assert_eq!(m.apply_map(&p("YI")).unwrap(), p("-YI"));
        let inv = m.inverse();
        for s in ["XY", "YZ", "-iZX"] {
            assert_eq!(inv.apply_map(&m.apply_map(&p(s)).unwrap()).unwrap(), p(s));
        }
    }

    #[test]
    fn invalid_images_are_rejected() {
        assert!(SymplecticMap::from_images(vec![p("X")], vec![p("X")]).is_err());
        assert!(SymplecticMap::from_images(vec![p("iX")], vec![p("Z")]).is_err());
    }

    #[test]
    fn matrix_and_signs() {
        let m = SymplecticMap::from_images(vec![p("-Z")], vec![p("X")]).unwrap();
        assert_eq!(m.matrix(), vec![vec![false, true], vec![true, false]]);
        assert_eq!(m.sign_table(), vec![-1, 1]);
    }
}
