"""8x16 bitmap glyphs, one hex string of 16 row bytes per character.

Generated by tools/make_font.py from DejaVu Sans Mono Bold.
"""

GLYPHS = {
    ' ': '00000000000000000000000000000000',
    '!': '00000018181818181800101800000000',
    '"': '00000064646400000000000000000000',
    '#': '00000012167f7f246cfe684800000000',
    '$': '000000183c7c78783e1e7e7c18180000',
    '%': '00000060d0d0721c660b0b0e00000000',
    '&': '0000183c70703078dfcfee7f10000000',
    "'": '00000018181800000000000000000000',
    '(': '00000c081818303030301818080c0000',
    ')': '00003030181818181818181830300000',
    '*': '000000187e3c7e180000000000000000',
    '+': '000000000018187eff18181800000000',
    ',': '00000000000000000000181818300000',
    '-': '00000000000000003c3c000000000000',
    '.': '00000000000000000000181800000000',
    '/': '00000006040c08181830302060400000',
    '0': '0000183c6666667e6666663c18000000',
    '1': '00000078781818181818187e00000000',
    '2': '0000307c4e060e0c1830607e00000000',
    '3': '0000187c4e061c3c06064e7c38000000',
    '4': '0000000c1c3c2c6c7e7e0c0c00000000',
    '5': '0000007c60607c7e06064e7c30000000',
    '6': '0000083e70607c7e6666663c18000000',
    '7': '0000007e0e0c0c1c1818303000000000',
    '8': '0000187c66667c3c6666667c18000000',
    '9': '0000187c6666667e3e060e7c30000000',
    ':': '00000000001818180000181800000000',
    ';': '00000000001818180000181818300000',
    '<': '0000000000061e70f03c0e0000000000',
    '=': '000000000000fe0000fe000000000000',
    '>': '0000000000e0780e0e7ce00000000000',
    '?': '0000187c46060c181810101800000000',
    '@': '000000183e62cedeb2b2dece603e0c00',
    'A': '000000383c3c3c647e7e66c700000000',
    'B': '0000007c66667e7c6666667e00000000',
    'C': '00000c3e726060606060723e0c000000',
    'D': '0000007c7e66666666667e7c00000000',
    'E': '0000007e7e607c7e60607e7e00000000',
    'F': '0000007e7e607c7e6060606000000000',
    'G': '0000083e7260606e6e66763e08000000',
    'H': '0000006666667e7e6666666600000000',
    'I': '0000007e7c18181818187c7e00000000',
    'J': '0000003e1e0e0e0e0e0c4c7c30000000',
    'K': '000000666c7c78786c6c666600000000',
    'L': '000000606060606060607e7e00000000',
    'M': '000000e6eefefedadac2c2c200000000',
    'N': '000000667676767e6e6e6e6600000000',
    'O': '0000183c6e6666e666666e3c18000000',
    'P': '0000007e7e66667e7c60606000000000',
    'Q': '0000183c6e6666e666666e3c1c040000',
    'R': '0000007c7e666e7c7c6e666700000000',
    'S': '0000187e6460783c0e066e7e18000000',
    'T': '000000fe7e1818181818181800000000',
    'U': '000000666666666666666e7e18000000',
    'V': '000000e66666666c3c3c3c3800000000',
    'W': '000000c3c3dbdbda7e7e6e6600000000',
    'X': '00000066663c3c183c3c66e600000000',
    'Y': '000000e7667c3c381818181800000000',
    'Z': '0000007e7e0e0c1830707e7e00000000',
    '[': '00001c1c10101010101010101c1c0000',
    '\\': '000000606030301018080c0406020000',
    ']': '00003838181818181818181838380000',
    '^': '000000383c6600000000000000000000',
    '_': '0000000000000000000000000000ff00',
    '`': '00003010000000000000000000000000',
    'a': '00000000007c661e7e66667e30000000',
    'b': '00006060607c7e666666667e08000000',
    'c': '00000000001e3e606060703e0c000000',
    'd': '00000606063e7e66e6666e7e30000000',
    'e': '00000000003c7e66fe60627e1c000000',
    'f': '00000e1e187e7e181818181800000000',
    'g': '00000000003e7e6666666e7e067e7c00',
    'h': '00006060607c7e666666666600000000',
    'i': '00001818007878181818187f00000000',
    'j': '00001c1c00383c1c1c1c1c1c18787800',
    'k': '0000606060666c78786c6e6600000000',
    'l': '00007070303030303030381e00000000',
    'm': '00000000007efedadadadada00000000',
    'n': '00000000007c7e666666666600000000',
    'o': '00000000003c7e666666667c18000000',
    'p': '00000000007c7e666666667e68606000',
    'q': '00000000003e7e66e6666e7e16060600',
    'r': '00000000003e3e303030303000000000',
    's': '00000000003c7c607c0e467e18000000',
    't': '00000010307e7e303030381e00000000',
    'u': '000000000066666666666e7e30000000',
    'v': '00000000004666666c3c3c3800000000',
    'w': '0000000000c3c3dbda7e7e6e00000000',
    'x': '0000000000667c3c183c3c6600000000',
    'y': '00000000004666663c3c3c1818707000',
    'z': '00000000007e7e0c1830707e00000000',
    '{': '00000e1c1818187870181818181e0000',
    '|': '00001818181818181818181818181800',
    '}': '000070781818181c1e18181818700000',
    '~': '000000000000007afe00000000000000',
    'ä': '00002c2c007c661e7e66667e30000000',
    'ö': '0000243c003c7e666666667c18000000',
    'ü': '00002c2c0066666666666e7e30000000',
    'Ä': '2c2c00383c3c3c647e7e66c700000000',
    'Ö': '2c2c183c6e6666e666666e3c18000000',
    'Ü': '2c2c00666666666666666e7e18000000',
    'ß': '0000387c666c787c6e66677e0c000000',
    'ſ': '00000e1e187878181818181800000000',
}
