"""Force-noise spectra of a cavity optomechanical sensor with coherent quantum noise cancellation."""

__version__ = "1.0.0"
