"""CNN-LSTM line OCR trained with CTC, cross-fold voting and CER evaluation, in numpy."""

__version__ = "0.1.0"
