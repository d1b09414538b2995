"""
LM Rate ADM - расчёт LM rate при несогласованном декодировании и его оптимизация по входу
"""

__version__ = "1.0.0"
__author__ = "LM Rate Team"
__description__ = "Alternating Double Maximization для C_LM на каналах AWGN с IQ-дисбалансом"
